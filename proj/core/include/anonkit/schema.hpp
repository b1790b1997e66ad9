#pragma once

#include <string>
#include <vector>

namespace anonkit {

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  /// Categorical only; fixed at schema load so every dataset sharing the
  /// schema encodes to the same matrix width.
  std::vector<std::string> categories;

  bool is_categorical() const { return kind == FeatureKind::categorical; }
  int category_index(const std::string& value) const;  // -1 if unknown
};

/// Column contract for a dataset: feature order here is the canonical column
/// order everywhere (CSV, encoded matrices, QI tuples).
struct Schema {
  std::vector<FeatureSpec> features;
  std::string label;
  std::vector<std::string> label_classes;

  int feature_index(const std::string& name) const;  // -1 if unknown
  int label_class_index(const std::string& value) const;
  const FeatureSpec& feature(const std::string& name) const;

  /// Throws ValidationError on duplicate names, label listed as a feature,
  /// empty category lists, or duplicate categories/classes.
  void validate() const;

  bool operator==(const Schema&) const = default;
};

bool operator==(const FeatureSpec&, const FeatureSpec&);

/// Reads the JSON schema format:
///   {"features":[{"name","kind","categories"?},...],
///    "label": "...", "label_classes": [...]}
Schema load_schema(const std::string& path);
Schema parse_schema(const std::string& json_text);
void save_schema(const Schema& schema, const std::string& path);

}  // namespace anonkit
