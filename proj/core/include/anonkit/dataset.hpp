#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "anonkit/schema.hpp"

namespace anonkit {

/// Tabular records bound to a Schema. Cells are doubles; categorical cells
/// hold the (exact, small-integer) category index. Labels are class indices.
/// Immutable by convention: operations return new Datasets.
struct Dataset {
  Schema schema;
  std::vector<std::vector<double>> rows;  // rows[i][f], schema feature order
  std::vector<int> labels;                // class index per row
  std::vector<std::int64_t> row_ids;      // stable, unique

  std::size_t size() const { return rows.size(); }
  double value(std::size_t row, std::size_t feature) const { return rows[row][feature]; }
  int category(std::size_t row, std::size_t feature) const {
    return static_cast<int>(rows[row][feature]);
  }
  /// Cell rendered as it appears in CSV (category name / shortest numeric).
  std::string cell_text(std::size_t row, std::size_t feature) const;

  /// Internal-consistency check (indices in range, ids unique).
  void validate() const;
};

struct CsvLoadStats {
  std::size_t rows_loaded = 0;
  std::size_t rows_skipped_missing = 0;  // rows with empty cells are dropped
};

/// RFC-4180 CSV with a header row naming every schema feature plus the label.
/// Unknown categories, unparseable numerics and missing columns are errors
/// naming the offending row/column; rows with empty (missing) cells are
/// skipped and counted in stats.
Dataset load_csv(const std::string& path, const Schema& schema, CsvLoadStats* stats = nullptr);
Dataset parse_csv(const std::string& text, const Schema& schema, CsvLoadStats* stats = nullptr);

void write_csv(const Dataset& data, const std::string& path);
std::string to_csv(const Dataset& data);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Deterministic three-way split: row positions are shuffled with the seed,
/// then cut at floor(n*f1) / floor(n*f2) / floor(n*f3); remainder rows go to
/// the first split. Errors when a positive fraction yields an empty split.
std::array<Dataset, 3> split(const Dataset& data, const std::array<double, 3>& fractions,
                             std::uint64_t seed);

/// Seeded subsample of at most max_rows rows (identity when already smaller).
Dataset subsample(const Dataset& data, std::size_t max_rows, std::uint64_t seed);

/// Dataset restricted to the named features (kept in schema order).
Dataset project(const Dataset& data, const std::vector<std::string>& feature_names);

/// QI name list validation: nonempty, all names exist, no duplicates.
/// Returns the feature indices in schema order.
std::vector<int> resolve_quasi_identifiers(const Schema& schema,
                                           const std::vector<std::string>& qi_names);

}  // namespace anonkit
