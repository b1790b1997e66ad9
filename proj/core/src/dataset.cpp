#include "anonkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "anonkit/error.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

namespace {

// RFC-4180 parser: quoted fields, embedded quotes doubled, CRLF or LF rows.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(fields));
    fields.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw ValidationError("CSV ends inside a quoted field");
  if (!field.empty() || field_started || !fields.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& s) {
  bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& column) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ValidationError("row " + std::to_string(row) + ", column '" + column +
                          "': cannot parse numeric value '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string Dataset::cell_text(std::size_t row, std::size_t feature) const {
  const FeatureSpec& spec = schema.features[feature];
  if (spec.is_categorical()) {
    return spec.categories[static_cast<std::size_t>(category(row, feature))];
  }
  return format_double(value(row, feature));
}

void Dataset::validate() const {
  schema.validate();
  if (rows.size() != labels.size() || rows.size() != row_ids.size()) {
    throw ValidationError("dataset rows/labels/row_ids sizes disagree");
  }
  std::unordered_set<std::int64_t> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != schema.features.size()) {
      throw ValidationError("row " + std::to_string(i) + " has wrong arity");
    }
    if (labels[i] < 0 || labels[i] >= static_cast<int>(schema.label_classes.size())) {
      throw ValidationError("row " + std::to_string(i) + " has out-of-range label");
    }
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      const FeatureSpec& spec = schema.features[f];
      if (spec.is_categorical()) {
        int c = category(i, f);
        if (c < 0 || c >= static_cast<int>(spec.categories.size())) {
          throw ValidationError("row " + std::to_string(i) + ", column '" + spec.name +
                                "': invalid category index");
        }
      }
    }
    if (!ids.insert(row_ids[i]).second) {
      throw ValidationError("duplicate row_id " + std::to_string(row_ids[i]));
    }
  }
}

Dataset parse_csv(const std::string& text, const Schema& schema, CsvLoadStats* stats) {
  schema.validate();
  auto records = parse_csv_records(text);
  if (records.empty()) throw ValidationError("CSV file is empty");

  const std::vector<std::string>& header = records[0];
  std::size_t expected = schema.features.size() + 1;
  if (header.size() != expected) {
    throw ValidationError("CSV header has " + std::to_string(header.size()) +
                          " columns; schema expects " + std::to_string(expected));
  }
  // Header must name every feature plus the label; any column order accepted.
  std::vector<int> col_to_feature(header.size(), -1);
  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label) {
      if (label_col >= 0) throw ValidationError("CSV header repeats the label column");
      label_col = static_cast<int>(c);
      continue;
    }
    int f = schema.feature_index(header[c]);
    if (f < 0) throw ValidationError("CSV header column '" + header[c] + "' not in schema");
    if (std::find(col_to_feature.begin(), col_to_feature.end(), f) != col_to_feature.end()) {
      throw ValidationError("CSV header repeats column '" + header[c] + "'");
    }
    col_to_feature[c] = f;
  }
  if (label_col < 0) throw ValidationError("CSV header is missing the label column '" + schema.label + "'");

  Dataset data;
  data.schema = schema;
  CsvLoadStats local;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;  // trailing blank line
    if (rec.size() != header.size()) {
      throw ValidationError("row " + std::to_string(r - 1) + " has " + std::to_string(rec.size()) +
                            " fields; expected " + std::to_string(header.size()));
    }
    bool missing = false;
    for (const auto& cell : rec) {
      if (cell.empty()) { missing = true; break; }
    }
    if (missing) {
      ++local.rows_skipped_missing;
      continue;
    }
    std::vector<double> row(schema.features.size(), 0.0);
    int label = -1;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      std::size_t data_row = data.rows.size();
      if (static_cast<int>(c) == label_col) {
        label = schema.label_class_index(rec[c]);
        if (label < 0) {
          throw ValidationError("row " + std::to_string(data_row) + ", column '" + schema.label +
                                "': unknown label class '" + rec[c] + "'");
        }
        continue;
      }
      int f = col_to_feature[c];
      const FeatureSpec& spec = schema.features[static_cast<std::size_t>(f)];
      if (spec.is_categorical()) {
        int cat = spec.category_index(rec[c]);
        if (cat < 0) {
          throw ValidationError("row " + std::to_string(data_row) + ", column '" + spec.name +
                                "': unknown category '" + rec[c] + "'");
        }
        row[static_cast<std::size_t>(f)] = cat;
      } else {
        row[static_cast<std::size_t>(f)] = parse_double(rec[c], data_row, spec.name);
      }
    }
    data.rows.push_back(std::move(row));
    data.labels.push_back(label);
    data.row_ids.push_back(static_cast<std::int64_t>(data.rows.size() - 1));
    ++local.rows_loaded;
  }
  if (stats) *stats = local;
  return data;
}

Dataset load_csv(const std::string& path, const Schema& schema, CsvLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema, stats);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t f = 0; f < data.schema.features.size(); ++f) {
    if (f) out += ',';
    out += csv_escape(data.schema.features[f].name);
  }
  out += ',';
  out += csv_escape(data.schema.label);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t f = 0; f < data.schema.features.size(); ++f) {
      if (f) out += ',';
      out += csv_escape(data.cell_text(i, f));
    }
    out += ',';
    out += csv_escape(data.schema.label_classes[static_cast<std::size_t>(data.labels[i])]);
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write data file '" + path + "'");
  out << to_csv(data);
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& positions) {
  Dataset out;
  out.schema = data.schema;
  out.rows.reserve(positions.size());
  out.labels.reserve(positions.size());
  out.row_ids.reserve(positions.size());
  for (std::size_t p : positions) {
    out.rows.push_back(data.rows[p]);
    out.labels.push_back(data.labels[p]);
    out.row_ids.push_back(data.row_ids[p]);
  }
  return out;
}

}  // namespace

std::array<Dataset, 3> split(const Dataset& data, const std::array<double, 3>& fractions,
                             std::uint64_t seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1 (got " + format_double(sum) + ")");
  }
  for (double f : fractions) {
    if (f < 0) throw ValidationError("split fractions must be nonnegative");
  }
  std::size_t n = data.size();
  if (n == 0) throw ValidationError("cannot split an empty dataset");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::array<std::size_t, 3> sizes{};
  for (int s = 0; s < 3; ++s) {
    sizes[static_cast<std::size_t>(s)] =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions[static_cast<std::size_t>(s)]));
  }
  std::size_t assigned = sizes[0] + sizes[1] + sizes[2];
  sizes[0] += n - assigned;  // remainder rows go to the first split

  for (int s = 0; s < 3; ++s) {
    if (fractions[static_cast<std::size_t>(s)] > 0 && sizes[static_cast<std::size_t>(s)] == 0) {
      throw ValidationError("split " + std::to_string(s + 1) +
                            " has positive fraction but would receive no rows");
    }
  }

  std::array<Dataset, 3> out;
  std::size_t offset = 0;
  for (int s = 0; s < 3; ++s) {
    std::vector<std::size_t> part(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                  order.begin() + static_cast<std::ptrdiff_t>(offset + sizes[static_cast<std::size_t>(s)]));
    out[static_cast<std::size_t>(s)] = take_rows(data, part);
    offset += sizes[static_cast<std::size_t>(s)];
  }
  return out;
}

Dataset subsample(const Dataset& data, std::size_t max_rows, std::uint64_t seed) {
  if (data.size() <= max_rows) return data;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  order.resize(max_rows);
  return take_rows(data, order);
}

Dataset project(const Dataset& data, const std::vector<std::string>& feature_names) {
  std::vector<int> keep;
  for (const auto& f : data.schema.features) {
    if (std::find(feature_names.begin(), feature_names.end(), f.name) != feature_names.end()) {
      keep.push_back(data.schema.feature_index(f.name));
    }
  }
  if (keep.empty()) throw ValidationError("projection keeps no features");
  for (const auto& name : feature_names) {
    if (data.schema.feature_index(name) < 0) {
      throw ValidationError("projection names unknown feature '" + name + "'");
    }
  }
  Dataset out;
  out.schema.label = data.schema.label;
  out.schema.label_classes = data.schema.label_classes;
  for (int f : keep) out.schema.features.push_back(data.schema.features[static_cast<std::size_t>(f)]);
  out.labels = data.labels;
  out.row_ids = data.row_ids;
  out.rows.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> row;
    row.reserve(keep.size());
    for (int f : keep) row.push_back(data.rows[i][static_cast<std::size_t>(f)]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<int> resolve_quasi_identifiers(const Schema& schema,
                                           const std::vector<std::string>& qi_names) {
  if (qi_names.empty()) throw ValidationError("quasi-identifier set is empty");
  std::unordered_set<std::string> seen;
  std::vector<int> indices;
  for (const auto& name : qi_names) {
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate quasi-identifier '" + name + "'");
    }
    if (name == schema.label) {
      throw ValidationError("label '" + name + "' cannot be a quasi-identifier");
    }
    int idx = schema.feature_index(name);
    if (idx < 0) throw ValidationError("quasi-identifier '" + name + "' not in schema");
    indices.push_back(idx);
  }
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace anonkit
