#include "anonkit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "anonkit/error.hpp"
#include "anonkit/rng.hpp"
#include "anonkit/threads.hpp"

namespace anonkit {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::logistic_regression: return "logistic_regression";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "decision_tree") return ModelKind::decision_tree;
  if (name == "random_forest") return ModelKind::random_forest;
  if (name == "logistic_regression") return ModelKind::logistic_regression;
  if (name == "mlp") return ModelKind::mlp;
  throw ValidationError("unknown model kind '" + name + "'");
}

void LearnerConfig::validate() const {
  if (tree.min_samples_leaf < 1) throw ValidationError("tree min_samples_leaf must be >= 1");
  if (tree.max_depth < 0) throw ValidationError("tree max_depth must be >= 0");
  if (forest.tree_count < 1) throw ValidationError("forest tree_count must be >= 1");
  if (forest.feature_fraction <= 0 || forest.feature_fraction > 1.0) {
    throw ValidationError("forest feature_fraction must be in (0, 1]");
  }
  if (logistic.learning_rate <= 0) throw ValidationError("logistic learning_rate must be > 0");
  if (logistic.epochs < 1) throw ValidationError("logistic epochs must be >= 1");
  if (mlp.learning_rate <= 0) throw ValidationError("mlp learning_rate must be > 0");
  if (mlp.epochs < 1 || mlp.batch_size < 1) {
    throw ValidationError("mlp epochs and batch_size must be >= 1");
  }
  for (int h : mlp.hidden_sizes) {
    if (h < 1) throw ValidationError("mlp hidden sizes must be >= 1");
  }
}

namespace {

std::vector<double> softmax_row(const std::vector<double>& z) {
  double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

LogisticModel fit_logistic(const LogisticParams& params, const EncodedMatrix& X,
                           const std::vector<int>& y, int class_count) {
  LogisticModel m;
  m.n_features = X.n_cols;
  m.n_classes = class_count;
  std::size_t stride = X.n_cols + 1;
  m.weights.assign(static_cast<std::size_t>(class_count) * stride, 0.0);

  // Full-batch gradient descent on softmax cross-entropy; zero init keeps the
  // run deterministic and makes untrained scores exactly uniform.
  std::vector<double> grad(m.weights.size());
  std::vector<double> logits(static_cast<std::size_t>(class_count));
  double inv_n = 1.0 / static_cast<double>(X.n_rows);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < X.n_rows; ++r) {
      auto row = X.row(r);
      for (int c = 0; c < class_count; ++c) {
        const double* w = m.weights.data() + static_cast<std::size_t>(c) * stride;
        double z = w[X.n_cols];
        for (std::size_t j = 0; j < X.n_cols; ++j) z += w[j] * row[j];
        logits[static_cast<std::size_t>(c)] = z;
      }
      std::vector<double> p = softmax_row(logits);
      for (int c = 0; c < class_count; ++c) {
        double d = (p[static_cast<std::size_t>(c)] - (y[r] == c ? 1.0 : 0.0)) * inv_n;
        double* g = grad.data() + static_cast<std::size_t>(c) * stride;
        for (std::size_t j = 0; j < X.n_cols; ++j) g[j] += d * row[j];
        g[X.n_cols] += d;
      }
    }
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      m.weights[i] -= params.learning_rate * grad[i];
    }
  }
  return m;
}

std::vector<double> logistic_scores(const LogisticModel& m, std::span<const double> row) {
  std::size_t stride = m.n_features + 1;
  std::vector<double> logits(static_cast<std::size_t>(m.n_classes));
  for (int c = 0; c < m.n_classes; ++c) {
    const double* w = m.weights.data() + static_cast<std::size_t>(c) * stride;
    double z = w[m.n_features];
    for (std::size_t j = 0; j < m.n_features; ++j) z += w[j] * row[j];
    logits[static_cast<std::size_t>(c)] = z;
  }
  return softmax_row(logits);
}

std::vector<std::size_t> bootstrap_positions(std::size_t n, Rng& rng) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = static_cast<std::size_t>(rng.next_below(n));
  }
  return rows;
}

std::vector<int> sample_feature_subset(std::size_t n_cols, double fraction, Rng& rng) {
  auto want = static_cast<std::size_t>(
      std::max(1.0, std::floor(fraction * static_cast<double>(n_cols))));
  if (want >= n_cols) return {};
  std::vector<int> all(n_cols);
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates: first `want` entries after shuffling prefix.
  for (std::size_t i = 0; i < want; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(n_cols - i));
    std::swap(all[i], all[j]);
  }
  all.resize(want);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<double> ClassificationModel::score_row(std::span<const double> row) const {
  if (row.size() != input_width) {
    throw ValidationError("input row width does not match the model's training layout");
  }
  std::vector<double> scores(static_cast<std::size_t>(class_count), 0.0);
  if (constant_class) {
    scores[static_cast<std::size_t>(*constant_class)] = 1.0;
    return scores;
  }
  switch (kind) {
    case ModelKind::decision_tree:
      return std::get<TreeModel>(impl).tree.predict_probs(row);
    case ModelKind::random_forest: {
      const auto& f = std::get<ForestModel>(impl);
      for (const auto& tree : f.trees) {
        scores[static_cast<std::size_t>(tree.predict(row))] += 1.0;
      }
      double inv = 1.0 / static_cast<double>(f.trees.size());
      for (double& s : scores) s *= inv;
      return scores;
    }
    case ModelKind::logistic_regression:
      return logistic_scores(std::get<LogisticModel>(impl), row);
    case ModelKind::mlp:
      return std::get<MlpModel>(impl).forward_logits(row);
  }
  return scores;
}

int ClassificationModel::predict_row(std::span<const double> row) const {
  std::vector<double> s = score_row(row);
  int best = 0;
  for (int c = 1; c < class_count; ++c) {
    if (s[static_cast<std::size_t>(c)] > s[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

ClassificationModel fit(const LearnerConfig& config, const EncodedMatrix& X,
                        const std::vector<int>& y, int class_count) {
  config.validate();
  if (X.n_rows == 0) throw ValidationError("cannot fit on an empty matrix");
  if (y.size() != X.n_rows) throw ValidationError("labels are not aligned with the matrix rows");
  if (class_count < 1) throw ValidationError("class_count must be >= 1");
  for (double v : X.values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in training matrix");
  }
  for (int label : y) {
    if (label < 0 || label >= class_count) throw ValidationError("label out of range");
  }

  ClassificationModel model;
  model.kind = config.kind;
  model.class_count = class_count;
  model.input_width = X.n_cols;

  std::unordered_set<int> distinct(y.begin(), y.end());
  if (distinct.size() == 1) {
    model.constant_class = *distinct.begin();
    return model;
  }

  std::vector<std::size_t> all_rows(X.n_rows);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  switch (config.kind) {
    case ModelKind::decision_tree: {
      CartParams p{config.tree.criterion, config.tree.min_samples_leaf, config.tree.max_depth};
      model.impl = TreeModel{CartTree::fit(X, y, all_rows, class_count, p)};
      break;
    }
    case ModelKind::random_forest: {
      ForestModel forest;
      std::size_t count = static_cast<std::size_t>(config.forest.tree_count);
      forest.trees.resize(count);
      forest.tree_features.resize(count);
      CartParams p{config.forest.tree.criterion, config.forest.tree.min_samples_leaf,
                   config.forest.tree.max_depth};
      parallel_for(count, [&](std::size_t t) {
        Rng rng(derive_seed(config.seed, t));
        std::vector<std::size_t> rows = bootstrap_positions(X.n_rows, rng);
        std::vector<int> cols = sample_feature_subset(X.n_cols, config.forest.feature_fraction, rng);
        forest.tree_features[t] = cols;
        forest.trees[t] =
            CartTree::fit(X, y, rows, class_count, p, cols.empty() ? nullptr : &cols);
      });
      model.impl = std::move(forest);
      break;
    }
    case ModelKind::logistic_regression:
      model.impl = fit_logistic(config.logistic, X, y, class_count);
      break;
    case ModelKind::mlp:
      model.impl = fit_mlp(config.mlp, config.seed, X, y, class_count);
      break;
  }
  return model;
}

std::vector<int> predict(const ClassificationModel& model, const EncodedMatrix& X) {
  std::vector<int> out(X.n_rows);
  for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = model.predict_row(X.row(r));
  return out;
}

std::vector<std::vector<double>> predict_scores(const ClassificationModel& model,
                                                const EncodedMatrix& X) {
  std::vector<std::vector<double>> out(X.n_rows);
  for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = model.score_row(X.row(r));
  return out;
}

double accuracy(const ClassificationModel& model, const Dataset& data, const Encoder& encoder) {
  if (data.size() == 0) throw ValidationError("accuracy needs a nonempty dataset");
  EncodedMatrix X = encoder.encode(data);
  std::vector<int> preds = predict(model, X);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

namespace {

double entropy_of_counts(const std::vector<std::int64_t>& counts, std::int64_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double categorical_gain(const Dataset& data, std::size_t f, double label_entropy,
                        int class_count) {
  const auto& spec = data.schema.features[f];
  std::size_t n_cat = spec.categories.size();
  std::vector<std::vector<std::int64_t>> counts(n_cat,
                                                std::vector<std::int64_t>(static_cast<std::size_t>(class_count), 0));
  std::vector<std::int64_t> totals(n_cat, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto c = static_cast<std::size_t>(data.category(i, f));
    ++counts[c][static_cast<std::size_t>(data.labels[i])];
    ++totals[c];
  }
  double cond = 0.0;
  double n = static_cast<double>(data.size());
  for (std::size_t c = 0; c < n_cat; ++c) {
    if (totals[c] == 0) continue;
    cond += static_cast<double>(totals[c]) / n * entropy_of_counts(counts[c], totals[c]);
  }
  return label_entropy - cond;
}

double numeric_gain(const Dataset& data, std::size_t f, double label_entropy, int class_count) {
  std::vector<std::pair<double, int>> sorted;
  sorted.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    sorted.emplace_back(data.value(i, f), data.labels[i]);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::int64_t> left(static_cast<std::size_t>(class_count), 0);
  std::vector<std::int64_t> right(static_cast<std::size_t>(class_count), 0);
  for (const auto& [v, label] : sorted) ++right[static_cast<std::size_t>(label)];
  double best = 0.0;
  double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    int label = sorted[i].second;
    ++left[static_cast<std::size_t>(label)];
    --right[static_cast<std::size_t>(label)];
    if (sorted[i].first == sorted[i + 1].first) continue;
    double nl = static_cast<double>(i + 1);
    double nr = n - nl;
    double cond = nl / n * entropy_of_counts(left, static_cast<std::int64_t>(nl)) +
                  nr / n * entropy_of_counts(right, static_cast<std::int64_t>(nr));
    best = std::max(best, label_entropy - cond);
  }
  return best;
}

}  // namespace

std::vector<std::string> select_features(const Dataset& data, std::size_t m) {
  std::size_t d = data.schema.features.size();
  if (m < 1 || m > d) {
    throw ValidationError("select_features m must be in [1, feature count]");
  }
  if (data.size() == 0) throw ValidationError("select_features needs a nonempty dataset");
  int class_count = static_cast<int>(data.schema.label_classes.size());
  std::vector<std::int64_t> label_counts(static_cast<std::size_t>(class_count), 0);
  for (int label : data.labels) ++label_counts[static_cast<std::size_t>(label)];
  double label_entropy = entropy_of_counts(label_counts, static_cast<std::int64_t>(data.size()));

  std::vector<std::pair<double, std::size_t>> gains;  // (gain, schema index)
  for (std::size_t f = 0; f < d; ++f) {
    double g = data.schema.features[f].is_categorical()
                   ? categorical_gain(data, f, label_entropy, class_count)
                   : numeric_gain(data, f, label_entropy, class_count);
    gains.emplace_back(g, f);
  }
  std::stable_sort(gains.begin(), gains.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // ties keep schema order via stable sort
  });
  std::vector<std::string> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back(data.schema.features[gains[i].second].name);
  }
  return out;
}

namespace presets {

LearnerConfig decision_tree() {
  LearnerConfig c;
  c.kind = ModelKind::decision_tree;
  c.tree.max_depth = 12;
  c.tree.min_samples_leaf = 5;
  return c;
}

LearnerConfig random_forest() {
  LearnerConfig c;
  c.kind = ModelKind::random_forest;
  c.forest.tree_count = 100;
  c.forest.feature_fraction = 1.0;
  return c;
}

LearnerConfig logistic_regression() {
  LearnerConfig c;
  c.kind = ModelKind::logistic_regression;
  return c;
}

LearnerConfig mlp_relu_100() {
  LearnerConfig c;
  c.kind = ModelKind::mlp;
  c.mlp.hidden_sizes = {100};
  c.mlp.activation = Activation::relu;
  c.mlp.learning_rate = 1e-3;
  c.mlp.epochs = 200;
  c.mlp.batch_size = 200;
  return c;
}

LearnerConfig mlp_tanh_1024_512_256() {
  LearnerConfig c;
  c.kind = ModelKind::mlp;
  c.mlp.hidden_sizes = {1024, 512, 256};
  c.mlp.activation = Activation::tanh;
  c.mlp.learning_rate = 1e-4;
  c.mlp.epochs = 200;
  c.mlp.batch_size = 200;
  return c;
}

LearnerConfig by_name(const std::string& name) {
  if (name == "decision_tree") return decision_tree();
  if (name == "random_forest") return random_forest();
  if (name == "logistic_regression") return logistic_regression();
  if (name == "mlp_relu_100") return mlp_relu_100();
  if (name == "mlp_tanh_1024_512_256") return mlp_tanh_1024_512_256();
  throw ValidationError("unknown learner preset '" + name + "'");
}

std::vector<std::string> names() {
  return {"decision_tree", "random_forest", "logistic_regression", "mlp_relu_100",
          "mlp_tanh_1024_512_256"};
}

}  // namespace presets

}  // namespace anonkit
