#include "anonkit/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "anonkit/rng.hpp"

namespace anonkit::synth {

namespace {

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

/// Box-Muller from two uniform draws; deterministic given the rng state.
double normal(Rng& rng, double mean, double stddev) {
  double u1 = std::max(rng.next_double(), 1e-12);
  double u2 = rng.next_double();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  return mean + stddev * z;
}

int weighted_choice(Rng& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = rng.next_double() * total;
  double cum = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

Schema adult_schema() {
  Schema s;
  auto cat = [](std::string name, std::vector<std::string> values) {
    return FeatureSpec{std::move(name), FeatureKind::categorical, std::move(values)};
  };
  auto num = [](std::string name) { return FeatureSpec{std::move(name), FeatureKind::numeric, {}}; };
  s.features = {
      num("age"),
      cat("workclass", {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov", "Local-gov",
                        "State-gov", "Without-pay", "Never-worked"}),
      num("education-num"),
      cat("marital-status", {"Married-civ-spouse", "Divorced", "Never-married", "Separated",
                             "Widowed", "Married-spouse-absent", "Married-AF-spouse"}),
      cat("occupation", {"Tech-support", "Craft-repair", "Other-service", "Sales",
                         "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
                         "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
                         "Transport-moving", "Priv-house-serv", "Protective-serv",
                         "Armed-Forces"}),
      cat("relationship", {"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
                           "Unmarried"}),
      cat("race", {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"}),
      cat("sex", {"Female", "Male"}),
      num("capital-gain"),
      num("capital-loss"),
      num("hours-per-week"),
      cat("native-country",
          {"United-States", "Mexico", "Philippines", "Germany", "Canada", "Puerto-Rico",
           "El-Salvador", "India", "Cuba", "England", "China", "Jamaica", "Italy",
           "Dominican-Republic", "Vietnam", "Guatemala", "Japan", "Poland", "Columbia",
           "Haiti", "Portugal"}),
  };
  s.label = "income";
  s.label_classes = {"<=50K", ">50K"};
  return s;
}

Dataset adult_like(std::size_t rows, std::uint64_t seed, double label_noise) {
  Schema schema = adult_schema();
  Dataset data;
  data.schema = schema;
  Rng rng(seed);

  constexpr int kAge = 0, kWorkclass = 1, kEdu = 2, kMarital = 3, kOccupation = 4,
                kRelationship = 5, kRace = 6, kSex = 7, kGain = 8, kLoss = 9, kHours = 10,
                kCountry = 11;

  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row(schema.features.size(), 0.0);

    double age = clamp(std::round(normal(rng, 38, 13)), 17, 90);
    row[kAge] = age;

    double edu = clamp(std::round(normal(rng, 10, 2.8)), 1, 16);
    row[kEdu] = edu;

    int marital;
    if (age < 26) {
      marital = weighted_choice(rng, {0.12, 0.03, 0.78, 0.03, 0.0, 0.03, 0.01});
    } else {
      marital = weighted_choice(rng, {0.52, 0.15, 0.18, 0.04, 0.05, 0.05, 0.01});
    }
    row[kMarital] = marital;

    int sex = weighted_choice(rng, {0.48, 0.52});
    row[kSex] = sex;

    int relationship;
    if (marital == 0 || marital == 6) {
      relationship = sex == 1 ? 2 : 0;  // Husband / Wife
    } else if (age < 24) {
      relationship = weighted_choice(rng, {0.0, 0.7, 0.0, 0.15, 0.05, 0.1});
    } else {
      relationship = weighted_choice(rng, {0.0, 0.05, 0.0, 0.55, 0.1, 0.3});
    }
    row[kRelationship] = relationship;

    // Higher education tilts toward professional occupations.
    std::vector<double> occ_w;
    if (edu >= 13) {
      occ_w = {0.09, 0.04, 0.03, 0.10, 0.26, 0.30, 0.01, 0.02, 0.08, 0.01, 0.02, 0.00, 0.03, 0.01};
    } else if (edu >= 9) {
      occ_w = {0.06, 0.15, 0.10, 0.13, 0.10, 0.06, 0.06, 0.08, 0.14, 0.03, 0.06, 0.01, 0.02, 0.00};
    } else {
      occ_w = {0.01, 0.16, 0.18, 0.05, 0.02, 0.01, 0.15, 0.16, 0.05, 0.09, 0.10, 0.02, 0.00, 0.00};
    }
    int occupation = weighted_choice(rng, occ_w);
    row[kOccupation] = occupation;

    row[kWorkclass] =
        weighted_choice(rng, {0.70, 0.08, 0.04, 0.04, 0.06, 0.05, 0.02, 0.01});
    row[kRace] = weighted_choice(rng, {0.83, 0.04, 0.01, 0.02, 0.10});
    row[kCountry] = weighted_choice(rng, {0.88, 0.02, 0.012, 0.008, 0.008, 0.008, 0.006, 0.006,
                                          0.006, 0.005, 0.005, 0.005, 0.004, 0.004, 0.004, 0.004,
                                          0.004, 0.003, 0.003, 0.003, 0.002});

    double gain = 0.0;
    if (rng.next_bool(0.08 + 0.04 * (edu >= 13))) {
      gain = clamp(std::round(std::exp(normal(rng, 8.3, 1.0))), 114, 99999);
    }
    row[kGain] = gain;
    double loss = 0.0;
    if (rng.next_bool(0.045)) loss = clamp(std::round(normal(rng, 1870, 280)), 155, 4356);
    row[kLoss] = loss;

    double hours = clamp(std::round(normal(rng, 41, 10)), 1, 99);
    row[kHours] = hours;

    // Clean income rule, then an independent label flip.
    static const double occ_bonus[] = {0.5,  0.15, -0.45, 0.35, 1.0,  0.9,  -0.35,
                                       -0.2, 0.0,  -0.3,  0.0,  -0.6, 0.3,  0.1};
    double z = 0.55 * (edu - 10.0) + 1.7 * (marital == 0 || marital == 6 ? 1.0 : 0.0) +
               occ_bonus[occupation] + 0.035 * (hours - 40.0) + 1.9 * (gain > 5000 ? 1.0 : 0.0) +
               0.022 * (age - 38.0) - 0.0006 * (age - 38.0) * (age - 38.0) +
               0.22 * (sex == 1 ? 1.0 : 0.0) - 1.55;
    int label = z > 0 ? 1 : 0;
    if (rng.next_bool(label_noise)) label = 1 - label;

    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
    data.row_ids.push_back(static_cast<std::int64_t>(i));
  }
  return data;
}

Schema nursery_schema() {
  Schema s;
  auto cat = [](std::string name, std::vector<std::string> values) {
    return FeatureSpec{std::move(name), FeatureKind::categorical, std::move(values)};
  };
  s.features = {
      cat("parents", {"usual", "pretentious", "great_pret"}),
      cat("has_nurs", {"proper", "less_proper", "improper", "critical", "very_crit"}),
      cat("form", {"complete", "completed", "incomplete", "foster"}),
      cat("children", {"1", "2", "3", "more"}),
      cat("housing", {"convenient", "less_conv", "critical"}),
      cat("finance", {"convenient", "inconv"}),
      cat("social", {"nonprob", "slightly_prob", "problematic"}),
      cat("health", {"recommended", "priority", "not_recom"}),
  };
  s.label = "class";
  s.label_classes = {"not_recom", "recommend", "very_recom", "priority", "spec_prior"};
  return s;
}

Dataset nursery_like(std::size_t rows, std::uint64_t seed, double label_noise) {
  Schema schema = nursery_schema();
  Dataset data;
  data.schema = schema;
  Rng rng(seed);

  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row(schema.features.size(), 0.0);
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      row[f] = static_cast<double>(
          rng.next_below(schema.features[f].categories.size()));
    }
    int parents = static_cast<int>(row[0]);
    int has_nurs = static_cast<int>(row[1]);
    int form = static_cast<int>(row[2]);
    int children = static_cast<int>(row[3]);
    int housing = static_cast<int>(row[4]);
    int finance = static_cast<int>(row[5]);
    int social = static_cast<int>(row[6]);
    int health = static_cast<int>(row[7]);

    int label;
    if (health == 2) {
      label = 0;  // not_recom
    } else {
      static const int parents_pts[] = {2, 1, 0};
      static const int nurs_pts[] = {2, 1, 1, 0, -1};
      static const int form_pts[] = {1, 1, 0, 0};
      static const int children_pts[] = {1, 1, 0, -1};
      static const int housing_pts[] = {1, 0, -1};
      static const int finance_pts[] = {1, 0};
      static const int social_pts[] = {1, 1, -2};
      int score = (health == 0 ? 2 : 0) + parents_pts[parents] + nurs_pts[has_nurs] +
                  form_pts[form] + children_pts[children] + housing_pts[housing] +
                  finance_pts[finance] + social_pts[social];
      if (score >= 9) label = 1;       // recommend
      else if (score >= 7) label = 2;  // very_recom
      else if (score >= 4) label = 3;  // priority
      else label = 4;                  // spec_prior
    }
    if (rng.next_bool(label_noise)) {
      label = static_cast<int>(rng.next_below(schema.label_classes.size()));
    }

    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
    data.row_ids.push_back(static_cast<std::int64_t>(i));
  }
  return data;
}

Schema toy_schema() {
  Schema s;
  s.features = {FeatureSpec{"x", FeatureKind::numeric, {}},
                FeatureSpec{"group", FeatureKind::categorical, {"a", "b", "c", "d"}}};
  s.label = "outcome";
  s.label_classes = {"neg", "pos"};
  return s;
}

Dataset separable_toy(std::size_t rows, std::uint64_t seed) {
  Schema schema = toy_schema();
  Dataset data;
  data.schema = schema;
  Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    double x = std::round(rng.next_double(0.0, 100.0) * 10.0) / 10.0;
    double group = static_cast<double>(rng.next_below(4));
    data.rows.push_back({x, group});
    data.labels.push_back(x > 50.0 ? 1 : 0);
    data.row_ids.push_back(static_cast<std::int64_t>(i));
  }
  return data;
}

Dataset random_mixed(std::size_t rows, std::size_t numeric_features,
                     std::size_t categorical_features, int classes, std::uint64_t seed) {
  Rng rng(seed);
  Schema schema;
  for (std::size_t f = 0; f < numeric_features; ++f) {
    schema.features.push_back(FeatureSpec{"num" + std::to_string(f), FeatureKind::numeric, {}});
  }
  for (std::size_t f = 0; f < categorical_features; ++f) {
    std::size_t n_cat = 2 + rng.next_below(5);
    std::vector<std::string> cats;
    for (std::size_t c = 0; c < n_cat; ++c) cats.push_back("v" + std::to_string(c));
    schema.features.push_back(
        FeatureSpec{"cat" + std::to_string(f), FeatureKind::categorical, std::move(cats)});
  }
  schema.label = "y";
  for (int c = 0; c < classes; ++c) schema.label_classes.push_back("c" + std::to_string(c));

  Dataset data;
  data.schema = schema;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row(schema.features.size(), 0.0);
    double signal = 0.0;
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      const auto& spec = schema.features[f];
      if (spec.is_categorical()) {
        row[f] = static_cast<double>(rng.next_below(spec.categories.size()));
      } else {
        row[f] = static_cast<double>(rng.next_below(41));  // integer grid 0..40
      }
      if (f < 2) signal += row[f];
    }
    int label = static_cast<int>(std::fmod(signal, static_cast<double>(classes)));
    if (rng.next_bool(0.3)) label = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
    data.row_ids.push_back(static_cast<std::int64_t>(i));
  }
  return data;
}

}  // namespace anonkit::synth
