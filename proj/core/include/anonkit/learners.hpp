#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "anonkit/cart.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/encode.hpp"
#include "anonkit/mlp.hpp"

namespace anonkit {

enum class ModelKind { decision_tree, random_forest, logistic_regression, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 1;
  SplitCriterion criterion = SplitCriterion::gini;
};

struct ForestParams {
  int tree_count = 100;
  /// Fraction of encoded columns each tree may split on (1.0 = all).
  double feature_fraction = 1.0;
  TreeParams tree;
};

struct LogisticParams {
  double learning_rate = 0.5;
  int epochs = 300;
};

struct LearnerConfig {
  ModelKind kind = ModelKind::decision_tree;
  std::uint64_t seed = 0;
  TreeParams tree;
  ForestParams forest;
  LogisticParams logistic;
  MlpParams mlp;

  void validate() const;
};

struct TreeModel {
  CartTree tree;
};

struct ForestModel {
  std::vector<CartTree> trees;
  /// Column subset each tree was grown on; empty = all columns.
  std::vector<std::vector<int>> tree_features;
};

struct LogisticModel {
  std::size_t n_features = 0;
  int n_classes = 0;
  std::vector<double> weights;  // n_classes x (n_features + 1), bias last
};

/// A fitted classifier. predict_scores semantics per kind: decision trees and
/// forests return class probabilities (leaf distribution / vote fractions),
/// logistic regression returns softmax probabilities, MLPs return raw logits.
/// Constant models (fit saw a single class) return an indicator vector.
struct ClassificationModel {
  ModelKind kind = ModelKind::decision_tree;
  int class_count = 0;
  std::size_t input_width = 0;
  std::optional<int> constant_class;
  std::variant<TreeModel, ForestModel, LogisticModel, MlpModel> impl;

  std::vector<double> score_row(std::span<const double> row) const;
  int predict_row(std::span<const double> row) const;  // argmax, ties -> lowest class
};

/// Deterministic for fixed (config, X, y, class_count): forest trees receive
/// per-tree seeds derived from the master seed, so results are independent of
/// execution order and worker count.
ClassificationModel fit(const LearnerConfig& config, const EncodedMatrix& X,
                        const std::vector<int>& y, int class_count);

std::vector<int> predict(const ClassificationModel& model, const EncodedMatrix& X);
std::vector<std::vector<double>> predict_scores(const ClassificationModel& model,
                                                const EncodedMatrix& X);

double accuracy(const ClassificationModel& model, const Dataset& data, const Encoder& encoder);

/// Top-m features by single-feature information gain on the label
/// (categorical: multiway partition by category; numeric: best midpoint
/// threshold). Returned in descending gain order; ties keep schema order.
std::vector<std::string> select_features(const Dataset& data, std::size_t m);

/// Model file round trip. Floats are stored as hex-float strings, so
/// save -> load -> save is byte-identical.
struct SavedModel {
  LearnerConfig config;
  ClassificationModel model;
  std::vector<std::string> features;       // encoder feature subset at fit time
  std::vector<std::string> label_classes;  // class names, index order
};

void save_model(const SavedModel& saved, const std::string& path);
SavedModel load_model(const std::string& path);

namespace presets {

LearnerConfig decision_tree();
LearnerConfig random_forest();
LearnerConfig logistic_regression();
/// One hidden layer of 100 relu units, adam lr 1e-3, batch 200, 200 epochs.
LearnerConfig mlp_relu_100();
/// Hidden layers 1024/512/256, tanh, adam lr 1e-4.
LearnerConfig mlp_tanh_1024_512_256();

/// Lookup by the names accepted in experiment configs and the CLI.
LearnerConfig by_name(const std::string& name);
std::vector<std::string> names();

}  // namespace presets

}  // namespace anonkit
