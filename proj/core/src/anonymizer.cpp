#include "anonkit/anonymizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "anonkit/error.hpp"
#include "json.hpp"

namespace anonkit {

std::string to_string(LabelSource s) {
  return s == LabelSource::model_predictions ? "model_predictions" : "true_labels";
}

LabelSource label_source_from_string(const std::string& s) {
  if (s == "model_predictions") return LabelSource::model_predictions;
  if (s == "true_labels") return LabelSource::true_labels;
  throw ValidationError("unknown label source '" + s + "'");
}

void AnonymizationConfig::validate(const Schema& schema) const {
  if (k < 1) throw ValidationError("k must be >= 1");
  resolve_quasi_identifiers(schema, qi);
}

ChooseRepresentativeResult choose_representative(const std::vector<std::vector<double>>& points,
                                                 const std::vector<int>& labels,
                                                 const std::vector<std::int64_t>& row_ids) {
  if (points.empty() || points.size() != labels.size() || points.size() != row_ids.size()) {
    throw ValidationError("choose_representative: empty or misaligned cluster");
  }
  int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  int majority = 0;
  for (int c = 1; c <= max_label; ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(majority)]) {
      majority = c;  // ties keep the lowest class index
    }
  }

  std::vector<std::size_t> member_pos;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] == majority) member_pos.push_back(i);
  }

  std::size_t dims = points[0].size();
  ChooseRepresentativeResult result;
  result.majority_label = majority;
  result.median_point.resize(dims);
  std::vector<double> column(member_pos.size());
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < member_pos.size(); ++i) column[i] = points[member_pos[i]][d];
    // Lower-of-two-middles: the median is always an actual data value.
    std::size_t mid = (column.size() - 1) / 2;
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid), column.end());
    result.median_point[d] = column[mid];
  }

  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t best_pos = member_pos[0];
  for (std::size_t i : member_pos) {
    double dist = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      double diff = points[i][d] - result.median_point[d];
      dist += diff * diff;
    }
    bool better = dist < best_dist ||
                  (dist == best_dist && row_ids[i] < row_ids[best_pos]);
    if (better) {
      best_dist = dist;
      best_pos = i;
    }
  }
  result.representative_position = best_pos;
  result.representative_row_id = row_ids[best_pos];
  return result;
}

namespace {

/// Copy of the matrix with numeric (non-indicator) columns min-max scaled to
/// [0,1] using this matrix's own statistics. Constant columns map to 0.
std::vector<double> scaled_values(const EncodedMatrix& x) {
  std::vector<double> scaled = x.values;
  for (std::size_t c = 0; c < x.n_cols; ++c) {
    if (x.columns[c].is_indicator()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < x.n_rows; ++r) {
      double v = x.at(r, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double range = hi - lo;
    for (std::size_t r = 0; r < x.n_rows; ++r) {
      double& v = scaled[r * x.n_cols + c];
      v = range > 0 ? (v - lo) / range : 0.0;
    }
  }
  return scaled;
}

}  // namespace

AnonymizerTree build_anonymizer_tree(const EncodedMatrix& x_qi, const std::vector<int>& guide_labels,
                                     int k, SplitCriterion criterion) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (x_qi.n_rows < static_cast<std::size_t>(k)) {
    throw ValidationError("need at least k rows to anonymize (" + std::to_string(x_qi.n_rows) +
                          " < " + std::to_string(k) + ")");
  }
  if (guide_labels.size() != x_qi.n_rows) {
    throw ValidationError("guide labels are not aligned with the QI matrix");
  }
  int class_count = 1 + *std::max_element(guide_labels.begin(), guide_labels.end());

  AnonymizerTree out;
  for (const auto& col : x_qi.columns) out.encoded_column_names.push_back(col.name);

  std::vector<std::size_t> rows(x_qi.n_rows);
  std::iota(rows.begin(), rows.end(), 0);
  CartParams params{criterion, k, 0};
  std::vector<std::vector<std::size_t>> leaf_members;
  out.tree = CartTree::fit(x_qi, guide_labels, rows, class_count, params, nullptr, &leaf_members);

  std::vector<double> scaled = scaled_values(x_qi);
  auto scaled_row = [&](std::size_t r) {
    return std::vector<double>(scaled.begin() + static_cast<std::ptrdiff_t>(r * x_qi.n_cols),
                               scaled.begin() + static_cast<std::ptrdiff_t>((r + 1) * x_qi.n_cols));
  };

  for (std::size_t node = 0; node < leaf_members.size(); ++node) {
    const auto& members = leaf_members[node];
    if (members.empty()) continue;
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    std::vector<std::int64_t> ids;
    points.reserve(members.size());
    for (std::size_t r : members) {
      points.push_back(scaled_row(r));
      labels.push_back(guide_labels[r]);
      ids.push_back(x_qi.row_ids[r]);
    }
    ChooseRepresentativeResult rep = choose_representative(points, labels, ids);
    LeafCluster cluster;
    cluster.member_row_ids = ids;
    cluster.majority_label = rep.majority_label;
    cluster.median_point = rep.median_point;
    cluster.representative_row_id = rep.representative_row_id;
    out.cluster_leaf_node.push_back(static_cast<int>(node));
    out.leaves.push_back(std::move(cluster));
  }
  return out;
}

AnonymizeResult anonymize(const Dataset& train, const std::vector<int>& guide_labels,
                          const AnonymizationConfig& config) {
  config.validate(train.schema);
  if (guide_labels.size() != train.size()) {
    throw ValidationError("guide labels are not aligned with the training rows");
  }
  if (train.size() < static_cast<std::size_t>(config.k)) {
    throw ValidationError("need at least k rows to anonymize (" + std::to_string(train.size()) +
                          " < " + std::to_string(config.k) + ")");
  }

  std::vector<int> qi_indices = resolve_quasi_identifiers(train.schema, config.qi);
  Encoder qi_encoder(train.schema, config.qi);
  EncodedMatrix x_qi = qi_encoder.encode(train);

  AnonymizeResult result;
  result.tree = build_anonymizer_tree(x_qi, guide_labels, config.k, config.criterion);
  result.data = train;

  // row_id -> position lookup for representative source rows.
  std::unordered_map<std::int64_t, std::size_t> pos_of_id;
  pos_of_id.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) pos_of_id[train.row_ids[i]] = i;

  for (const LeafCluster& cluster : result.tree.leaves) {
    std::size_t rep_pos = pos_of_id.at(cluster.representative_row_id);
    for (std::int64_t id : cluster.member_row_ids) {
      std::size_t row = pos_of_id.at(id);
      for (int f : qi_indices) {
        result.data.rows[row][static_cast<std::size_t>(f)] =
            train.rows[rep_pos][static_cast<std::size_t>(f)];
      }
    }
  }
  return result;
}

std::string anonymizer_tree_to_json(const AnonymizerTree& tree) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "anonkit-anonymizer-tree";
  doc["version"] = 1;
  doc["encoded_columns"] = tree.encoded_column_names;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tree.tree.nodes()) {
    ordered_json nj;
    if (n.is_leaf()) {
      nj["leaf"] = true;
    } else {
      nj["column"] = n.feature;
      nj["threshold"] = n.threshold;
      nj["left"] = n.left;
      nj["right"] = n.right;
    }
    nodes.push_back(std::move(nj));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json leaves = ordered_json::array();
  for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
    const LeafCluster& c = tree.leaves[i];
    ordered_json lj;
    lj["node"] = tree.cluster_leaf_node[i];
    lj["members"] = c.member_row_ids;
    lj["majority_label"] = c.majority_label;
    lj["median"] = c.median_point;
    lj["representative_row_id"] = c.representative_row_id;
    leaves.push_back(std::move(lj));
  }
  doc["leaves"] = std::move(leaves);
  return doc.dump(1) + "\n";
}

void save_anonymizer_tree(const AnonymizerTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tree file '" + path + "'");
  out << anonymizer_tree_to_json(tree);
}

PipelineResult anonymize_pipeline(const Dataset& data, const PipelineOptions& options) {
  options.anonymization.validate(data.schema);
  auto parts = split(data, options.fractions, options.seed);
  const Dataset& train_original = parts[0];
  const Dataset& train_anonymizer = parts[1];
  const Dataset& validation = parts[2];

  Encoder encoder(data.schema);
  int class_count = static_cast<int>(data.schema.label_classes.size());

  PipelineResult result;
  result.original_model =
      fit(options.original_model, encoder.encode(train_original), train_original.labels, class_count);

  std::vector<int> guide_labels;
  if (options.anonymization.label_source == LabelSource::model_predictions) {
    guide_labels = predict(result.original_model, encoder.encode(train_anonymizer));
  } else {
    guide_labels = train_anonymizer.labels;
  }

  AnonymizeResult anonymized = anonymize(train_anonymizer, guide_labels, options.anonymization);
  result.anonymized = std::move(anonymized.data);
  result.tree = std::move(anonymized.tree);

  result.retrained_model =
      fit(options.retrain_model, encoder.encode(result.anonymized), result.anonymized.labels, class_count);

  result.original_accuracy = accuracy(result.original_model, validation, encoder);
  result.retrained_accuracy = accuracy(result.retrained_model, validation, encoder);
  return result;
}

}  // namespace anonkit
