#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "anonkit/cart.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/encode.hpp"
#include "anonkit/learners.hpp"

namespace anonkit {

enum class LabelSource { model_predictions, true_labels };

std::string to_string(LabelSource s);
LabelSource label_source_from_string(const std::string& s);

struct AnonymizationConfig {
  int k = 1;
  std::vector<std::string> qi;
  LabelSource label_source = LabelSource::model_predictions;
  SplitCriterion criterion = SplitCriterion::gini;
  std::uint64_t seed = 0;

  void validate(const Schema& schema) const;
};

/// One generalization group: the rows routed to one tree leaf, the majority
/// guide label among them, the coordinate-wise median of the majority-label
/// points (in the scaled encoded QI space used for distances), and the actual
/// member chosen to represent the group.
struct LeafCluster {
  std::vector<std::int64_t> member_row_ids;
  int majority_label = -1;
  std::vector<double> median_point;
  std::int64_t representative_row_id = -1;
};

/// The fitted partitioning tree over encoded QI columns plus its leaf groups.
struct AnonymizerTree {
  CartTree tree;
  std::vector<std::string> encoded_column_names;
  std::vector<int> cluster_leaf_node;  // node id of each cluster's leaf
  std::vector<LeafCluster> leaves;
};

struct ChooseRepresentativeResult {
  int majority_label = -1;
  std::vector<double> median_point;
  std::size_t representative_position = 0;
  std::int64_t representative_row_id = -1;
};

/// Majority label by count (ties -> lowest class index); median_point is the
/// coordinate-wise median over majority-label points (even counts take the
/// lower of the two middles); the representative is the majority-label point
/// with the smallest Euclidean distance to the median (ties -> lowest row id).
ChooseRepresentativeResult choose_representative(const std::vector<std::vector<double>>& points,
                                                 const std::vector<int>& labels,
                                                 const std::vector<std::int64_t>& row_ids);

/// Grows a CART over the encoded QI columns where a split is admissible only
/// if both children keep >= k rows, then fills in each leaf's cluster
/// (members, majority label, median, representative). Distances for
/// representative selection use the matrix with its numeric columns min-max
/// scaled to [0,1] by the statistics of this training matrix; indicator
/// columns are left as-is.
AnonymizerTree build_anonymizer_tree(const EncodedMatrix& x_qi, const std::vector<int>& guide_labels,
                                     int k, SplitCriterion criterion);

struct AnonymizeResult {
  Dataset data;
  AnonymizerTree tree;
};

/// Accuracy-guided k-anonymization: partitions the rows with the guided tree
/// and replaces every row's QI values with its leaf representative's original
/// (un-encoded) QI values. Non-QI columns, labels, row ids and order are
/// untouched; the output stays in the original feature domain.
AnonymizeResult anonymize(const Dataset& train, const std::vector<int>& guide_labels,
                          const AnonymizationConfig& config);

/// Audit document: splits, leaf membership and representatives as JSON.
std::string anonymizer_tree_to_json(const AnonymizerTree& tree);
void save_anonymizer_tree(const AnonymizerTree& tree, const std::string& path);

struct PipelineOptions {
  LearnerConfig original_model;
  LearnerConfig retrain_model;
  AnonymizationConfig anonymization;
  std::array<double, 3> fractions{0.4, 0.4, 0.2};
  std::uint64_t seed = 0;
};

struct PipelineResult {
  ClassificationModel original_model;
  Dataset anonymized;
  AnonymizerTree tree;
  ClassificationModel retrained_model;
  double original_accuracy = 0.0;
  double retrained_accuracy = 0.0;
};

/// Full loop: split -> fit original on split 1 -> label split 2 with its
/// predictions (or true labels) -> anonymize split 2 -> retrain on the
/// anonymized rows with their true labels -> report both accuracies on
/// split 3.
PipelineResult anonymize_pipeline(const Dataset& data, const PipelineOptions& options);

}  // namespace anonkit
