#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anonkit/dataset.hpp"

namespace anonkit {

/// Where an encoded column came from: feature index in the source schema and
/// the category it indicates (-1 for numeric pass-through columns).
struct EncodedColumn {
  int feature = -1;
  int category = -1;
  std::string name;

  bool is_indicator() const { return category >= 0; }
};

/// Dense row-major real matrix with provenance for every column.
struct EncodedMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // n_rows * n_cols
  std::vector<EncodedColumn> columns;
  std::vector<std::int64_t> row_ids;

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values.data() + r * n_cols, n_cols);
  }
  std::span<double> row(std::size_t r) {
    return std::span<double>(values.data() + r * n_cols, n_cols);
  }
};

/// One-hot encoder over a fixed feature subset. Numeric features pass through
/// unscaled as single columns; each categorical feature expands to one
/// indicator column per schema category, so matrices from any dataset sharing
/// the schema are dimensionally identical.
class Encoder {
 public:
  Encoder() = default;
  /// Features are encoded in schema order regardless of the order given.
  Encoder(const Schema& schema, const std::vector<std::string>& feature_names);

  /// All schema features.
  explicit Encoder(const Schema& schema);

  EncodedMatrix encode(const Dataset& data) const;

  /// Inverse of encode for one matrix row: feature cells (category indices
  /// for categorical features) keyed by the encoder's feature order.
  std::vector<double> decode_row(std::span<const double> row) const;

  const std::vector<int>& feature_indices() const { return feature_indices_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Schema& schema() const { return schema_; }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<EncodedColumn>& columns() const { return columns_; }

 private:
  Schema schema_;
  std::vector<int> feature_indices_;        // schema order
  std::vector<std::string> feature_names_;  // schema order
  std::vector<EncodedColumn> columns_;
};

/// Convenience free function mirroring the encoder: one-hot encode a feature
/// subset of a dataset.
EncodedMatrix one_hot_encode(const Dataset& data, const std::vector<std::string>& feature_names);

}  // namespace anonkit
