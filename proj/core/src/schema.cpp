#include "anonkit/schema.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "anonkit/error.hpp"
#include "json.hpp"

namespace anonkit {

using ordered_json = nlohmann::ordered_json;

bool operator==(const FeatureSpec& a, const FeatureSpec& b) {
  return a.name == b.name && a.kind == b.kind && a.categories == b.categories;
}

int FeatureSpec::category_index(const std::string& value) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == value) return static_cast<int>(i);
  }
  return -1;
}

int Schema::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Schema::label_class_index(const std::string& value) const {
  for (std::size_t i = 0; i < label_classes.size(); ++i) {
    if (label_classes[i] == value) return static_cast<int>(i);
  }
  return -1;
}

const FeatureSpec& Schema::feature(const std::string& name) const {
  int idx = feature_index(name);
  if (idx < 0) throw ValidationError("schema has no feature named '" + name + "'");
  return features[static_cast<std::size_t>(idx)];
}

void Schema::validate() const {
  if (features.empty()) throw ValidationError("schema declares no features");
  if (label.empty()) throw ValidationError("schema declares no label column");
  if (label_classes.empty()) throw ValidationError("schema declares no label classes");

  std::unordered_set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw ValidationError("schema has a feature with an empty name");
    if (!seen.insert(f.name).second) {
      throw ValidationError("duplicate feature name '" + f.name + "' in schema");
    }
    if (f.name == label) {
      throw ValidationError("label '" + label + "' is also listed as a feature");
    }
    if (f.is_categorical()) {
      if (f.categories.empty()) {
        throw ValidationError("categorical feature '" + f.name + "' has no categories");
      }
      std::unordered_set<std::string> cats;
      for (const auto& c : f.categories) {
        if (!cats.insert(c).second) {
          throw ValidationError("duplicate category '" + c + "' in feature '" + f.name + "'");
        }
      }
    } else if (!f.categories.empty()) {
      throw ValidationError("numeric feature '" + f.name + "' must not declare categories");
    }
  }
  std::unordered_set<std::string> classes;
  for (const auto& c : label_classes) {
    if (!classes.insert(c).second) {
      throw ValidationError("duplicate label class '" + c + "'");
    }
  }
}

Schema parse_schema(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("schema parse failure: ") + e.what());
  }

  Schema schema;
  try {
    if (!doc.is_object()) throw ValidationError("schema root must be a JSON object");
    for (const auto& f : doc.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      std::string kind = f.at("kind").get<std::string>();
      if (kind == "numeric") {
        spec.kind = FeatureKind::numeric;
      } else if (kind == "categorical") {
        spec.kind = FeatureKind::categorical;
      } else {
        throw ValidationError("feature '" + spec.name + "' has unknown kind '" + kind + "'");
      }
      if (f.contains("categories")) {
        spec.categories = f.at("categories").get<std::vector<std::string>>();
      }
      schema.features.push_back(std::move(spec));
    }
    schema.label = doc.at("label").get<std::string>();
    schema.label_classes = doc.at("label_classes").get<std::vector<std::string>>();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("schema parse failure: ") + e.what());
  }

  schema.validate();
  return schema;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open schema file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

void save_schema(const Schema& schema, const std::string& path) {
  ordered_json doc;
  doc["features"] = ordered_json::array();
  for (const auto& f : schema.features) {
    ordered_json fj;
    fj["name"] = f.name;
    fj["kind"] = f.is_categorical() ? "categorical" : "numeric";
    if (f.is_categorical()) fj["categories"] = f.categories;
    doc["features"].push_back(std::move(fj));
  }
  doc["label"] = schema.label;
  doc["label_classes"] = schema.label_classes;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write schema file '" + path + "'");
  out << doc.dump(2) << "\n";
}

}  // namespace anonkit
