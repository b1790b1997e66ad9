#include "anonkit/mondrian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "anonkit/error.hpp"

namespace anonkit {

namespace {

struct GlobalStats {
  // per QI feature: numeric range or global distinct-category count
  std::vector<double> numeric_lo, numeric_hi;
  std::vector<std::size_t> distinct_count;
};

struct Splitter {
  const Dataset& data;
  const std::vector<int>& qi;
  const GlobalStats& global;
  std::size_t min_size;
  std::vector<std::vector<std::size_t>> final_partitions;

  void run(std::vector<std::size_t>&& rows) {
    // Candidate features ordered by normalized width, widest first.
    std::vector<std::pair<double, std::size_t>> widths;  // (-width, qi position)
    for (std::size_t q = 0; q < qi.size(); ++q) {
      double w = normalized_width(rows, q);
      if (w > 0) widths.emplace_back(-w, q);
    }
    std::sort(widths.begin(), widths.end());

    for (const auto& [neg_w, q] : widths) {
      std::vector<std::size_t> left, right;
      if (try_split(rows, q, left, right)) {
        run(std::move(left));
        run(std::move(right));
        return;
      }
    }
    final_partitions.push_back(std::move(rows));
  }

  double normalized_width(const std::vector<std::size_t>& rows, std::size_t q) const {
    auto f = static_cast<std::size_t>(qi[q]);
    const FeatureSpec& spec = data.schema.features[f];
    if (spec.is_categorical()) {
      if (global.distinct_count[q] == 0) return 0.0;
      std::unordered_set<int> present;
      for (std::size_t r : rows) present.insert(data.category(r, f));
      if (present.size() < 2) return 0.0;  // nothing to cut
      return static_cast<double>(present.size()) /
             static_cast<double>(global.distinct_count[q]);
    }
    double g = global.numeric_hi[q] - global.numeric_lo[q];
    if (g <= 0) return 0.0;
    double lo = data.value(rows[0], f), hi = lo;
    for (std::size_t r : rows) {
      double v = data.value(r, f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return (hi - lo) / g;
  }

  bool try_split(const std::vector<std::size_t>& rows, std::size_t q,
                 std::vector<std::size_t>& left, std::vector<std::size_t>& right) const {
    auto f = static_cast<std::size_t>(qi[q]);
    const FeatureSpec& spec = data.schema.features[f];
    if (spec.is_categorical()) {
      // Frequency-ordered category list, cut at the median mass.
      std::vector<std::int64_t> counts(spec.categories.size(), 0);
      for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data.category(r, f))];
      std::vector<int> order;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) order.push_back(static_cast<int>(c));
      }
      if (order.size() < 2) return false;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)]) {
          return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
        }
        return a < b;
      });
      std::int64_t total = static_cast<std::int64_t>(rows.size());
      std::int64_t cum = 0;
      std::size_t cut = 0;  // left group = order[0..cut]
      for (std::size_t i = 0; i < order.size(); ++i) {
        cum += counts[static_cast<std::size_t>(order[i])];
        if (2 * cum >= total) {
          cut = i;
          break;
        }
      }
      if (cut + 1 >= order.size()) {
        if (cut == 0) return false;  // one category holds everything
        cut -= 1;                    // keep the right side nonempty
      }
      std::unordered_set<int> left_cats(order.begin(),
                                        order.begin() + static_cast<std::ptrdiff_t>(cut + 1));
      for (std::size_t r : rows) {
        if (left_cats.count(data.category(r, f))) left.push_back(r);
        else right.push_back(r);
      }
    } else {
      std::vector<double> values;
      values.reserve(rows.size());
      for (std::size_t r : rows) values.push_back(data.value(r, f));
      std::size_t mid = (values.size() - 1) / 2;  // lower median
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                       values.end());
      double median = values[mid];
      for (std::size_t r : rows) {
        if (data.value(r, f) <= median) left.push_back(r);
        else right.push_back(r);
      }
    }
    if (left.size() < min_size || right.size() < min_size) {
      left.clear();
      right.clear();
      return false;
    }
    return true;
  }
};

}  // namespace

Dataset mondrian_anonymize(const Dataset& train, const std::vector<std::string>& qi_names, int k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (train.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("need at least k rows to anonymize (" + std::to_string(train.size()) +
                          " < " + std::to_string(k) + ")");
  }
  std::vector<int> qi = resolve_quasi_identifiers(train.schema, qi_names);

  GlobalStats global;
  global.numeric_lo.resize(qi.size());
  global.numeric_hi.resize(qi.size());
  global.distinct_count.resize(qi.size());
  for (std::size_t q = 0; q < qi.size(); ++q) {
    auto f = static_cast<std::size_t>(qi[q]);
    if (train.schema.features[f].is_categorical()) {
      std::unordered_set<int> present;
      for (std::size_t r = 0; r < train.size(); ++r) present.insert(train.category(r, f));
      global.distinct_count[q] = present.size();
    } else {
      double lo = train.value(0, f), hi = lo;
      for (std::size_t r = 0; r < train.size(); ++r) {
        double v = train.value(r, f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      global.numeric_lo[q] = lo;
      global.numeric_hi[q] = hi;
    }
  }

  Splitter splitter{train, qi, global, static_cast<std::size_t>(k), {}};
  std::vector<std::size_t> all(train.size());
  std::iota(all.begin(), all.end(), 0);
  splitter.run(std::move(all));

  Dataset out = train;
  for (const auto& part : splitter.final_partitions) {
    for (std::size_t q = 0; q < qi.size(); ++q) {
      auto f = static_cast<std::size_t>(qi[q]);
      const FeatureSpec& spec = train.schema.features[f];
      double recoded;
      if (spec.is_categorical()) {
        std::vector<std::int64_t> counts(spec.categories.size(), 0);
        for (std::size_t r : part) ++counts[static_cast<std::size_t>(train.category(r, f))];
        std::size_t mode = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
          if (counts[c] > counts[mode]) mode = c;  // ties keep the lowest index
        }
        recoded = static_cast<double>(mode);
      } else {
        double lo = train.value(part[0], f), hi = lo;
        for (std::size_t r : part) {
          double v = train.value(r, f);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        recoded = (lo + hi) / 2.0;
      }
      for (std::size_t r : part) out.rows[r][f] = recoded;
    }
  }
  return out;
}

}  // namespace anonkit
