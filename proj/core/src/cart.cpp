#include "anonkit/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anonkit/error.hpp"

namespace anonkit {

namespace {

double impurity(const std::vector<std::int64_t>& counts, std::int64_t total,
                SplitCriterion criterion) {
  if (total == 0) return 0.0;
  double inv = 1.0 / static_cast<double>(total);
  if (criterion == SplitCriterion::gini) {
    double g = 1.0;
    for (std::int64_t c : counts) {
      double p = static_cast<double>(c) * inv;
      g -= p * p;
    }
    return g;
  }
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) * inv;
    h -= p * std::log2(p);
  }
  return h;
}

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct BuildCtx {
  const EncodedMatrix& X;
  const std::vector<int>& y;
  const CartParams& params;
  const std::vector<int>* allowed;
  int class_count;
  std::vector<CartNode>* nodes;
  std::vector<std::vector<std::size_t>>* leaf_members;
  // scratch reused across nodes
  std::vector<std::pair<double, int>> sorted;
};

BestSplit find_best_split(BuildCtx& ctx, const std::vector<std::size_t>& rows,
                          const std::vector<std::int64_t>& counts, double parent_imp) {
  BestSplit best;
  std::size_t m = rows.size();
  std::size_t msl = static_cast<std::size_t>(ctx.params.min_samples_leaf);
  if (m < 2 * msl) return best;
  double inv_m = 1.0 / static_cast<double>(m);

  std::vector<std::int64_t> left(static_cast<std::size_t>(ctx.class_count));
  std::vector<std::int64_t> right(static_cast<std::size_t>(ctx.class_count));

  auto consider_feature = [&](int col) {
    auto& sorted = ctx.sorted;
    sorted.clear();
    sorted.reserve(m);
    for (std::size_t r : rows) {
      sorted.emplace_back(ctx.X.at(r, static_cast<std::size_t>(col)), ctx.y[r]);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (sorted.front().first == sorted.back().first) return;  // constant column

    std::fill(left.begin(), left.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(ctx.class_count); ++i) {
      right[i] = counts[i];
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      int cls = sorted[i].second;
      ++left[static_cast<std::size_t>(cls)];
      --right[static_cast<std::size_t>(cls)];
      if (sorted[i].first == sorted[i + 1].first) continue;  // not a boundary
      std::size_t nl = i + 1;
      std::size_t nr = m - nl;
      if (nl < msl || nr < msl) continue;
      double child =
          (static_cast<double>(nl) * impurity(left, static_cast<std::int64_t>(nl), ctx.params.criterion) +
           static_cast<double>(nr) * impurity(right, static_cast<std::int64_t>(nr), ctx.params.criterion)) *
          inv_m;
      double gain = parent_imp - child;
      if (gain > best.gain + 1e-12) {
        best.found = true;
        best.feature = col;
        best.threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
        best.gain = gain;
      }
    }
  };

  if (ctx.allowed) {
    for (int col : *ctx.allowed) consider_feature(col);
  } else {
    for (std::size_t col = 0; col < ctx.X.n_cols; ++col) consider_feature(static_cast<int>(col));
  }
  return best;
}

int build_node(BuildCtx& ctx, std::vector<std::size_t>&& rows, int depth) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(ctx.class_count), 0);
  for (std::size_t r : rows) ++counts[static_cast<std::size_t>(ctx.y[r])];
  double parent_imp = impurity(counts, static_cast<std::int64_t>(rows.size()), ctx.params.criterion);

  bool pure = parent_imp <= 0.0;
  bool depth_capped = ctx.params.max_depth > 0 && depth >= ctx.params.max_depth;

  BestSplit best;
  if (!pure && !depth_capped) best = find_best_split(ctx, rows, counts, parent_imp);

  int node_id = static_cast<int>(ctx.nodes->size());
  ctx.nodes->emplace_back();
  (*ctx.nodes)[static_cast<std::size_t>(node_id)].class_counts = counts;

  if (!best.found) {
    if (ctx.leaf_members) {
      if (ctx.leaf_members->size() <= static_cast<std::size_t>(node_id)) {
        ctx.leaf_members->resize(static_cast<std::size_t>(node_id) + 1);
      }
      (*ctx.leaf_members)[static_cast<std::size_t>(node_id)] = std::move(rows);
    }
    return node_id;
  }

  std::vector<std::size_t> left_rows, right_rows;
  left_rows.reserve(rows.size());
  right_rows.reserve(rows.size());
  for (std::size_t r : rows) {
    if (ctx.X.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold) {
      left_rows.push_back(r);
    } else {
      right_rows.push_back(r);
    }
  }
  rows.clear();
  rows.shrink_to_fit();

  int left_id = build_node(ctx, std::move(left_rows), depth + 1);
  int right_id = build_node(ctx, std::move(right_rows), depth + 1);
  CartNode& node = (*ctx.nodes)[static_cast<std::size_t>(node_id)];
  node.feature = best.feature;
  node.threshold = best.threshold;
  node.left = left_id;
  node.right = right_id;
  return node_id;
}

}  // namespace

CartTree CartTree::fit(const EncodedMatrix& X, const std::vector<int>& y,
                       const std::vector<std::size_t>& row_positions, int class_count,
                       const CartParams& params, const std::vector<int>* allowed_features,
                       std::vector<std::vector<std::size_t>>* leaf_members) {
  if (row_positions.empty()) throw ValidationError("cannot fit a tree on zero rows");
  if (params.min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
  if (class_count < 1) throw ValidationError("class_count must be >= 1");
  for (std::size_t r : row_positions) {
    if (y[r] < 0 || y[r] >= class_count) throw ValidationError("label out of range in tree fit");
  }
  if (row_positions.size() < static_cast<std::size_t>(params.min_samples_leaf)) {
    throw ValidationError("tree fit needs at least min_samples_leaf rows");
  }

  CartTree tree;
  tree.class_count_ = class_count;
  if (leaf_members) leaf_members->clear();
  BuildCtx ctx{X, y, params, allowed_features, class_count, &tree.nodes_, leaf_members, {}};
  std::vector<std::size_t> rows = row_positions;
  build_node(ctx, std::move(rows), 0);
  if (leaf_members) leaf_members->resize(tree.nodes_.size());
  return tree;
}

int CartTree::apply(std::span<const double> row) const {
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const CartNode& n = nodes_[static_cast<std::size_t>(id)];
    id = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return id;
}

int CartTree::predict(std::span<const double> row) const {
  const CartNode& leaf = nodes_[static_cast<std::size_t>(apply(row))];
  int best = 0;
  for (int c = 1; c < class_count_; ++c) {
    if (leaf.class_counts[static_cast<std::size_t>(c)] >
        leaf.class_counts[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return best;
}

std::vector<double> CartTree::predict_probs(std::span<const double> row) const {
  const CartNode& leaf = nodes_[static_cast<std::size_t>(apply(row))];
  std::int64_t total = 0;
  for (std::int64_t c : leaf.class_counts) total += c;
  std::vector<double> probs(static_cast<std::size_t>(class_count_), 0.0);
  for (int c = 0; c < class_count_; ++c) {
    probs[static_cast<std::size_t>(c)] =
        static_cast<double>(leaf.class_counts[static_cast<std::size_t>(c)]) /
        static_cast<double>(total);
  }
  return probs;
}

std::size_t CartTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) {
    if (node.is_leaf()) ++n;
  }
  return n;
}

std::size_t CartTree::depth() const {
  // Iterative depth over the node array.
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const CartNode& n = nodes_[static_cast<std::size_t>(id)];
    deepest = std::max(deepest, d);
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return deepest;
}

}  // namespace anonkit
