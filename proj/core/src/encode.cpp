#include "anonkit/encode.hpp"

#include <algorithm>

#include "anonkit/error.hpp"

namespace anonkit {

Encoder::Encoder(const Schema& schema, const std::vector<std::string>& feature_names)
    : schema_(schema) {
  if (feature_names.empty()) throw ValidationError("encoder feature subset is empty");
  for (const auto& name : feature_names) {
    if (schema.feature_index(name) < 0) {
      throw ValidationError("encoder feature '" + name + "' not in schema");
    }
  }
  for (std::size_t f = 0; f < schema.features.size(); ++f) {
    const auto& spec = schema.features[f];
    if (std::find(feature_names.begin(), feature_names.end(), spec.name) == feature_names.end()) {
      continue;
    }
    feature_indices_.push_back(static_cast<int>(f));
    feature_names_.push_back(spec.name);
    if (spec.is_categorical()) {
      for (std::size_t c = 0; c < spec.categories.size(); ++c) {
        columns_.push_back(EncodedColumn{static_cast<int>(f), static_cast<int>(c),
                                         spec.name + "=" + spec.categories[c]});
      }
    } else {
      columns_.push_back(EncodedColumn{static_cast<int>(f), -1, spec.name});
    }
  }
}

namespace {
std::vector<std::string> all_names(const Schema& schema) {
  std::vector<std::string> names;
  names.reserve(schema.features.size());
  for (const auto& f : schema.features) names.push_back(f.name);
  return names;
}
}  // namespace

Encoder::Encoder(const Schema& schema) : Encoder(schema, all_names(schema)) {}

EncodedMatrix Encoder::encode(const Dataset& data) const {
  if (!(data.schema == schema_)) {
    throw ValidationError("dataset schema does not match the encoder's schema");
  }
  EncodedMatrix m;
  m.n_rows = data.size();
  m.n_cols = columns_.size();
  m.columns = columns_;
  m.row_ids = data.row_ids;
  m.values.assign(m.n_rows * m.n_cols, 0.0);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    double* out = m.values.data() + i * m.n_cols;
    std::size_t c = 0;
    for (int f : feature_indices_) {
      const auto& spec = schema_.features[static_cast<std::size_t>(f)];
      if (spec.is_categorical()) {
        int cat = data.category(i, static_cast<std::size_t>(f));
        out[c + static_cast<std::size_t>(cat)] = 1.0;
        c += spec.categories.size();
      } else {
        out[c] = data.value(i, static_cast<std::size_t>(f));
        c += 1;
      }
    }
  }
  return m;
}

std::vector<double> Encoder::decode_row(std::span<const double> row) const {
  if (row.size() != columns_.size()) {
    throw ValidationError("encoded row width does not match encoder layout");
  }
  std::vector<double> cells;
  cells.reserve(feature_indices_.size());
  std::size_t c = 0;
  for (int f : feature_indices_) {
    const auto& spec = schema_.features[static_cast<std::size_t>(f)];
    if (spec.is_categorical()) {
      int hot = -1;
      for (std::size_t k = 0; k < spec.categories.size(); ++k) {
        if (row[c + k] == 1.0) {
          hot = static_cast<int>(k);
          break;
        }
      }
      if (hot < 0) throw ValidationError("one-hot group for '" + spec.name + "' has no set indicator");
      cells.push_back(hot);
      c += spec.categories.size();
    } else {
      cells.push_back(row[c]);
      c += 1;
    }
  }
  return cells;
}

EncodedMatrix one_hot_encode(const Dataset& data, const std::vector<std::string>& feature_names) {
  return Encoder(data.schema, feature_names).encode(data);
}

}  // namespace anonkit
