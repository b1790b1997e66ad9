#include "anonkit/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "anonkit/error.hpp"
#include "anonkit/mondrian.hpp"
#include "anonkit/qi_presets.hpp"
#include "anonkit/rng.hpp"
#include "json.hpp"

namespace anonkit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string to_string(AnonymizationMethod m) {
  return m == AnonymizationMethod::accuracy_guided ? "ag" : "mondrian";
}

namespace {

AnonymizationMethod method_from_string(const std::string& s) {
  if (s == "ag") return AnonymizationMethod::accuracy_guided;
  if (s == "mondrian") return AnonymizationMethod::mondrian;
  throw ValidationError("unknown method '" + s + "' (expected ag|mondrian)");
}

/// Group rows by their QI tuple. std::map keys give a deterministic
/// (lexicographic) group order for reports.
std::map<std::vector<double>, std::vector<std::size_t>> group_by_qi(
    const Dataset& data, const std::vector<int>& qi_indices) {
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  std::vector<double> key(qi_indices.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t q = 0; q < qi_indices.size(); ++q) {
      key[q] = data.value(r, static_cast<std::size_t>(qi_indices[q]));
    }
    groups[key].push_back(r);
  }
  return groups;
}

}  // namespace

KAnonymityReport verify_k_anonymity(const Dataset& data, const std::vector<std::string>& qi,
                                    int k) {
  std::vector<int> qi_indices = resolve_quasi_identifiers(data.schema, qi);
  KAnonymityReport report;
  report.k_requested = k;
  if (data.size() == 0) {
    report.pass = true;
    return report;
  }
  auto groups = group_by_qi(data, qi_indices);
  report.group_count = groups.size();
  report.min_group_size = data.size();
  for (const auto& [key, rows] : groups) {
    report.min_group_size = std::min(report.min_group_size, rows.size());
    if (rows.size() < static_cast<std::size_t>(k)) {
      std::vector<std::string> tuple;
      tuple.reserve(qi_indices.size());
      for (int f : qi_indices) {
        tuple.push_back(data.cell_text(rows.front(), static_cast<std::size_t>(f)));
      }
      report.violating_tuples.emplace_back(std::move(tuple), rows.size());
    }
  }
  report.pass = report.min_group_size >= static_cast<std::size_t>(k);
  return report;
}

EquivalenceClassStats equivalence_class_stats(const Dataset& data,
                                              const std::vector<std::string>& qi) {
  std::vector<int> qi_indices = resolve_quasi_identifiers(data.schema, qi);
  EquivalenceClassStats stats;
  if (data.size() == 0) return stats;
  auto groups = group_by_qi(data, qi_indices);
  stats.group_count = groups.size();
  stats.min_size = data.size();
  for (const auto& [key, rows] : groups) {
    stats.min_size = std::min(stats.min_size, rows.size());
    stats.max_size = std::max(stats.max_size, rows.size());
  }
  stats.mean_size = static_cast<double>(data.size()) / static_cast<double>(groups.size());
  return stats;
}

namespace {

ordered_json k_report_json(const KAnonymityReport& r) {
  ordered_json j;
  j["k_requested"] = r.k_requested;
  j["min_group_size"] = r.min_group_size;
  j["group_count"] = r.group_count;
  j["pass"] = r.pass;
  ordered_json viol = ordered_json::array();
  for (const auto& [tuple, count] : r.violating_tuples) {
    viol.push_back(ordered_json{{"tuple", tuple}, {"count", count}});
  }
  j["violating_tuples"] = std::move(viol);
  return j;
}

ordered_json attack_json(const AttackResult& a) {
  return ordered_json{{"attack_accuracy", a.attack_accuracy},
                      {"precision", a.precision},
                      {"recall", a.recall}};
}

}  // namespace

std::string k_anonymity_report_to_json(const KAnonymityReport& report) {
  return k_report_json(report).dump(1) + "\n";
}

std::string evaluation_report_to_json(const EvaluationReport& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["learner"] = r.learner;
  j["method"] = r.method;
  j["qi"] = r.qi;
  j["k"] = r.k;
  j["label_source"] = r.label_source;
  j["seeds"] = r.seeds;
  j["baseline_accuracy"] = r.baseline_accuracy;
  j["baseline_accuracy_stddev"] = r.baseline_accuracy_stddev;
  // Method-specific accuracy key keeps one row per (k, method) cell.
  j[r.method == "mondrian" ? "mondrian_accuracy" : "ag_accuracy"] = r.anonymized_accuracy;
  j["anonymized_accuracy_stddev"] = r.anonymized_accuracy_stddev;
  j["verification"] = k_report_json(r.verification);
  if (r.membership_attack_original || r.attribute_attack_original) {
    ordered_json attacks;
    if (r.membership_attack_original) {
      attacks["membership_original"] = attack_json(*r.membership_attack_original);
      attacks["membership_retrained"] = attack_json(*r.membership_attack_retrained);
    }
    if (r.attribute_attack_original) {
      attacks["attribute_original"] = attack_json(*r.attribute_attack_original);
      attacks["attribute_retrained"] = attack_json(*r.attribute_attack_retrained);
    }
    j["attacks"] = std::move(attacks);
  } else {
    j["attacks"] = nullptr;
  }
  return j.dump();
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("experiment config parse failure: ") + e.what());
  }

  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(msg); };

  ExperimentConfig cfg;
  auto resolve_path = [&](const std::string& p) {
    fs::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
    return path.string();
  };

  if (doc.contains("dataset") && doc["dataset"].is_string()) {
    cfg.dataset_path = resolve_path(doc["dataset"].get<std::string>());
    if (!fs::exists(cfg.dataset_path)) fail("dataset file not found: " + cfg.dataset_path);
  } else {
    fail("config requires a string 'dataset' path");
  }
  Schema schema;
  bool have_schema = false;
  if (doc.contains("schema") && doc["schema"].is_string()) {
    cfg.schema_path = resolve_path(doc["schema"].get<std::string>());
    if (!fs::exists(cfg.schema_path)) {
      fail("schema file not found: " + cfg.schema_path);
    } else {
      try {
        schema = load_schema(cfg.schema_path);
        have_schema = true;
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  } else {
    fail("config requires a string 'schema' path");
  }

  if (doc.contains("qi_preset") && doc.contains("qi_list")) {
    fail("config must give either 'qi_preset' or 'qi_list', not both");
  } else if (doc.contains("qi_preset")) {
    try {
      cfg.qi = qi_presets::by_name(doc["qi_preset"].get<std::string>());
    } catch (const std::exception& e) {
      fail(e.what());
    }
  } else if (doc.contains("qi_list")) {
    try {
      cfg.qi = doc["qi_list"].get<std::vector<std::string>>();
    } catch (const std::exception&) {
      fail("'qi_list' must be an array of feature names");
    }
  } else {
    fail("config requires 'qi_preset' or 'qi_list'");
  }
  if (have_schema && !cfg.qi.empty()) {
    try {
      resolve_quasi_identifiers(schema, cfg.qi);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  if (doc.contains("ks") && doc["ks"].is_array() && !doc["ks"].empty()) {
    for (const auto& kj : doc["ks"]) {
      if (!kj.is_number_integer() || kj.get<int>() < 1) {
        fail("every k must be an integer >= 1");
        break;
      }
      cfg.ks.push_back(kj.get<int>());
    }
  } else {
    fail("config requires a nonempty integer array 'ks'");
  }

  if (doc.contains("methods") && doc["methods"].is_array() && !doc["methods"].empty()) {
    for (const auto& mj : doc["methods"]) {
      try {
        cfg.methods.push_back(method_from_string(mj.get<std::string>()));
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  } else {
    fail("config requires a nonempty array 'methods' (ag|mondrian)");
  }

  if (doc.contains("learners") && doc["learners"].is_array() && !doc["learners"].empty()) {
    for (const auto& lj : doc["learners"]) {
      std::string name = lj.get<std::string>();
      try {
        presets::by_name(name);
        cfg.learners.push_back(name);
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  } else {
    fail("config requires a nonempty array 'learners'");
  }

  if (doc.contains("label_source")) {
    try {
      cfg.label_source = label_source_from_string(doc["label_source"].get<std::string>());
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  if (doc.contains("attacks") && !doc["attacks"].is_null()) {
    const auto& aj = doc["attacks"];
    if (!aj.is_object()) {
      fail("'attacks' must be an object");
    } else {
      if (aj.contains("membership")) cfg.attacks.membership = aj["membership"].get<bool>();
      if (aj.contains("attribute") && !aj["attribute"].is_null()) {
        std::string feature = aj["attribute"].get<std::string>();
        cfg.attacks.attribute_feature = feature;
        if (have_schema) {
          int f = schema.feature_index(feature);
          if (f < 0) {
            fail("attribute attack feature '" + feature + "' not in schema");
          } else if (!schema.features[static_cast<std::size_t>(f)].is_categorical()) {
            fail("attribute attack feature '" + feature + "' must be categorical");
          }
        }
      }
      if (aj.contains("attack_kind")) {
        try {
          cfg.attacks.attack_kind =
              membership_attack_kind_from_string(aj["attack_kind"].get<std::string>());
        } catch (const std::exception& e) {
          fail(e.what());
        }
      }
    }
  }

  if (doc.contains("seeds")) {
    cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) fail("'seeds' must not be empty");
  } else if (doc.contains("seed")) {
    cfg.seeds = {doc["seed"].get<std::uint64_t>()};
  }

  if (doc.contains("subsample")) {
    if (!doc["subsample"].is_number_integer() || doc["subsample"].get<std::int64_t>() < 0) {
      fail("'subsample' must be an integer >= 0 (0 = full dataset)");
    } else {
      cfg.subsample = doc["subsample"].get<std::size_t>();
    }
  }

  if (doc.contains("fractions")) {
    auto fr = doc["fractions"].get<std::vector<double>>();
    if (fr.size() != 3) {
      fail("'fractions' must have exactly 3 entries");
    } else {
      cfg.fractions = {fr[0], fr[1], fr[2]};
      double sum = fr[0] + fr[1] + fr[2];
      if (std::fabs(sum - 1.0) > 1e-9) fail("'fractions' must sum to 1");
    }
  }

  if (doc.contains("feature_selection_m") && !doc["feature_selection_m"].is_null()) {
    if (!doc["feature_selection_m"].is_number_integer() ||
        doc["feature_selection_m"].get<std::int64_t>() < 1) {
      fail("'feature_selection_m' must be an integer >= 1");
    } else {
      cfg.feature_selection_m = doc["feature_selection_m"].get<std::size_t>();
      if (have_schema && *cfg.feature_selection_m > schema.features.size()) {
        fail("'feature_selection_m' exceeds the schema's feature count");
      }
    }
  }

  if (!errors.empty()) {
    std::string all = "experiment config invalid:";
    for (const auto& e : errors) all += "\n  - " + e;
    throw ValidationError(all);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), fs::path(path).parent_path().string());
}

namespace {

struct CellAggregate {
  std::vector<double> baseline_accs;
  std::vector<double> anonymized_accs;
  std::vector<AttackResult> membership_original, membership_retrained;
  std::vector<AttackResult> attribute_original, attribute_retrained;
  KAnonymityReport verification;
  bool verification_set = false;
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

AttackResult mean_attack(const std::vector<AttackResult>& v) {
  AttackResult out;
  for (const auto& a : v) {
    out.attack_accuracy += a.attack_accuracy;
    out.precision += a.precision;
    out.recall += a.recall;
  }
  double n = static_cast<double>(v.size());
  out.attack_accuracy /= n;
  out.precision /= n;
  out.recall /= n;
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, const std::string& work_dir) {
  fs::create_directories(work_dir);
  Schema schema = load_schema(config.schema_path);
  Dataset full = load_csv(config.dataset_path, schema);
  std::string dataset_name = fs::path(config.dataset_path).stem().string();
  int class_count = static_cast<int>(schema.label_classes.size());

  // cell key: (learner index, k index, method index)
  std::map<std::array<std::size_t, 3>, CellAggregate> cells;

  for (std::size_t li = 0; li < config.learners.size(); ++li) {
    const std::string& learner_name = config.learners[li];
    for (std::uint64_t seed : config.seeds) {
      auto started = std::chrono::steady_clock::now();

      Dataset working =
          config.subsample > 0 ? subsample(full, config.subsample, seed) : full;
      auto parts = split(working, config.fractions, seed);
      Dataset& train_original = parts[0];
      Dataset& train_anonymizer = parts[1];
      Dataset& validation = parts[2];

      std::vector<std::string> qi_eff = config.qi;
      if (config.feature_selection_m) {
        std::vector<std::string> selected =
            select_features(train_original, *config.feature_selection_m);
        train_original = project(train_original, selected);
        train_anonymizer = project(train_anonymizer, selected);
        validation = project(validation, selected);
        qi_eff.clear();
        for (const auto& name : config.qi) {
          if (std::find(selected.begin(), selected.end(), name) != selected.end()) {
            qi_eff.push_back(name);
          }
        }
        if (qi_eff.empty()) {
          throw std::runtime_error("feature selection removed every quasi-identifier");
        }
      }
      const Schema& cell_schema = train_original.schema;
      Encoder encoder(cell_schema);

      LearnerConfig original_cfg = presets::by_name(learner_name);
      original_cfg.seed = derive_seed(seed, 1);
      ClassificationModel original_model =
          fit(original_cfg, encoder.encode(train_original), train_original.labels, class_count);
      double baseline_acc = accuracy(original_model, validation, encoder);

      std::vector<int> guide_labels;
      if (config.label_source == LabelSource::model_predictions) {
        guide_labels = predict(original_model, encoder.encode(train_anonymizer));
      } else {
        guide_labels = train_anonymizer.labels;
      }

      // Attack reference: a model of the same kind trained on the raw rows
      // that the mitigated model sees only in anonymized form.
      std::optional<AttackResult> mem_orig, attr_orig;
      bool want_attacks = config.attacks.membership || config.attacks.attribute_feature;
      if (want_attacks) {
        LearnerConfig raw_cfg = presets::by_name(learner_name);
        raw_cfg.seed = derive_seed(seed, 2);
        ClassificationModel unmitigated =
            fit(raw_cfg, encoder.encode(train_anonymizer), train_anonymizer.labels, class_count);
        if (config.attacks.membership) {
          MembershipAttackConfig mac;
          mac.attack_kind = config.attacks.attack_kind;
          mac.seed = derive_seed(seed, 4);
          mem_orig = membership_attack(unmitigated, encoder, train_anonymizer, validation, mac);
        }
        if (config.attacks.attribute_feature) {
          attr_orig = attribute_attack(unmitigated, encoder, train_anonymizer,
                                       *config.attacks.attribute_feature, {});
        }
      }

      for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
        int k = config.ks[ki];
        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
          AnonymizationMethod method = config.methods[mi];
          Dataset anonymized;
          if (method == AnonymizationMethod::accuracy_guided) {
            AnonymizationConfig ac;
            ac.k = k;
            ac.qi = qi_eff;
            ac.label_source = config.label_source;
            ac.seed = seed;
            anonymized = anonymize(train_anonymizer, guide_labels, ac).data;
          } else {
            anonymized = mondrian_anonymize(train_anonymizer, qi_eff, k);
          }

          // Prove the artifact that ships: serialize, reload, verify, and
          // retrain from the reloaded rows.
          std::string file_name = "anon_" + dataset_name + "_" + learner_name + "_" +
                                  to_string(method) + "_k" + std::to_string(k) + "_seed" +
                                  std::to_string(seed) + ".csv";
          std::string path = (fs::path(work_dir) / file_name).string();
          write_csv(anonymized, path);
          Dataset reloaded = load_csv(path, cell_schema);
          KAnonymityReport verification = verify_k_anonymity(reloaded, qi_eff, k);
          if (!verification.pass) {
            throw std::runtime_error("k-anonymity verification failed for " + path +
                                     " (min group " + std::to_string(verification.min_group_size) +
                                     " < k=" + std::to_string(k) + ")");
          }

          LearnerConfig retrain_cfg = presets::by_name(learner_name);
          retrain_cfg.seed = derive_seed(seed, 3);
          ClassificationModel retrained =
              fit(retrain_cfg, encoder.encode(reloaded), reloaded.labels, class_count);
          double anon_acc = accuracy(retrained, validation, encoder);

          CellAggregate& agg = cells[{li, ki, mi}];
          agg.baseline_accs.push_back(baseline_acc);
          agg.anonymized_accs.push_back(anon_acc);
          if (!agg.verification_set || verification.min_group_size < agg.verification.min_group_size) {
            agg.verification = verification;
            agg.verification_set = true;
          }
          if (config.attacks.membership) {
            MembershipAttackConfig mac;
            mac.attack_kind = config.attacks.attack_kind;
            mac.seed = derive_seed(seed, 4);
            agg.membership_original.push_back(*mem_orig);
            agg.membership_retrained.push_back(
                membership_attack(retrained, encoder, train_anonymizer, validation, mac));
          }
          if (config.attacks.attribute_feature) {
            agg.attribute_original.push_back(*attr_orig);
            agg.attribute_retrained.push_back(attribute_attack(
                retrained, encoder, train_anonymizer, *config.attacks.attribute_feature, {}));
          }
        }
      }

      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
      std::cerr << "[experiment] learner=" << learner_name << " seed=" << seed
                << " wall_ms=" << elapsed << "\n";
    }
  }

  ExperimentOutput out;
  std::string plot = "method,k,accuracy\n";
  for (std::size_t li = 0; li < config.learners.size(); ++li) {
    for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const CellAggregate& agg = cells.at({li, ki, mi});
        EvaluationReport row;
        row.dataset = dataset_name;
        row.learner = config.learners[li];
        row.method = to_string(config.methods[mi]);
        row.qi = config.qi;
        row.k = config.ks[ki];
        row.label_source = to_string(config.label_source);
        row.seeds = config.seeds;
        row.baseline_accuracy = mean_of(agg.baseline_accs);
        row.baseline_accuracy_stddev = stddev_of(agg.baseline_accs);
        row.anonymized_accuracy = mean_of(agg.anonymized_accs);
        row.anonymized_accuracy_stddev = stddev_of(agg.anonymized_accs);
        row.verification = agg.verification;
        if (!agg.membership_original.empty()) {
          row.membership_attack_original = mean_attack(agg.membership_original);
          row.membership_attack_retrained = mean_attack(agg.membership_retrained);
        }
        if (!agg.attribute_original.empty()) {
          row.attribute_attack_original = mean_attack(agg.attribute_original);
          row.attribute_attack_retrained = mean_attack(agg.attribute_retrained);
        }
        out.report_jsonl += evaluation_report_to_json(row);
        out.report_jsonl += "\n";
        plot += config.learners[li] + ":" + row.method + "," + std::to_string(row.k) + "," +
                format_double(row.anonymized_accuracy) + "\n";
        out.rows.push_back(std::move(row));
      }
      // Baseline reference point per (learner, k) for the accuracy-vs-k plot.
      const CellAggregate& first = cells.at({li, ki, 0});
      plot += config.learners[li] + ":baseline," + std::to_string(config.ks[ki]) + "," +
              format_double(mean_of(first.baseline_accs)) + "\n";
    }
  }
  out.plot_csv = std::move(plot);
  return out;
}

}  // namespace anonkit
