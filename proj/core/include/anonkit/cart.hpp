#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anonkit/encode.hpp"

namespace anonkit {

enum class SplitCriterion { gini, information_gain };

struct CartParams {
  SplitCriterion criterion = SplitCriterion::gini;
  int min_samples_leaf = 1;
  int max_depth = 0;  // 0 = unlimited
};

/// Binary tree node. Internal nodes test x[feature] <= threshold (left on
/// true); leaves carry the training class counts.
struct CartNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::int64_t> class_counts;

  bool is_leaf() const { return feature < 0; }
};

/// Greedy binary CART. Numeric thresholds sit at midpoints between sorted
/// distinct values; one-hot indicator columns split as numeric at 0.5. A
/// split is admissible only when both children receive >= min_samples_leaf
/// rows; growth stops at purity, max_depth, or when no admissible split
/// improves impurity. Deterministic: candidates are scanned in ascending
/// (column, threshold) order and only a strictly better gain replaces the
/// incumbent.
class CartTree {
 public:
  /// allowed_features: optional column subset (forest feature subsampling).
  /// leaf_members: when given, receives the training-row positions routed to
  /// each leaf (indexed by the node id of the leaf).
  static CartTree fit(const EncodedMatrix& X, const std::vector<int>& y,
                      const std::vector<std::size_t>& row_positions, int class_count,
                      const CartParams& params,
                      const std::vector<int>* allowed_features = nullptr,
                      std::vector<std::vector<std::size_t>>* leaf_members = nullptr);

  /// Leaf node id for one input row.
  int apply(std::span<const double> row) const;

  int predict(std::span<const double> row) const;           // argmax, ties -> lowest class
  std::vector<double> predict_probs(std::span<const double> row) const;

  const std::vector<CartNode>& nodes() const { return nodes_; }
  int class_count() const { return class_count_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  std::vector<CartNode>& mutable_nodes() { return nodes_; }
  void set_class_count(int c) { class_count_ = c; }

 private:
  std::vector<CartNode> nodes_;
  int class_count_ = 0;
};

}  // namespace anonkit
