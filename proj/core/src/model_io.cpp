#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "anonkit/error.hpp"
#include "anonkit/learners.hpp"
#include "json.hpp"

namespace anonkit {

namespace {

using ordered_json = nlohmann::ordered_json;

// Hex-float text round-trips doubles bit-exactly, independent of locale and
// shortest-repr subtleties.
std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double unhexf(const std::string& s) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end != c + s.size()) throw ValidationError("model file: bad float '" + s + "'");
  return v;
}

ordered_json doubles_to_json(const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(hexf(x));
  return arr;
}

std::vector<double> doubles_from_json(const ordered_json& arr) {
  std::vector<double> v;
  v.reserve(arr.size());
  for (const auto& x : arr) v.push_back(unhexf(x.get<std::string>()));
  return v;
}

ordered_json tree_to_json(const CartTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tree.nodes()) {
    ordered_json nj;
    nj["f"] = n.feature;
    nj["t"] = hexf(n.threshold);
    nj["l"] = n.left;
    nj["r"] = n.right;
    nj["c"] = n.class_counts;
    nodes.push_back(std::move(nj));
  }
  ordered_json out;
  out["class_count"] = tree.class_count();
  out["nodes"] = std::move(nodes);
  return out;
}

CartTree tree_from_json(const ordered_json& doc) {
  CartTree tree;
  tree.set_class_count(doc.at("class_count").get<int>());
  auto& nodes = tree.mutable_nodes();
  for (const auto& nj : doc.at("nodes")) {
    CartNode n;
    n.feature = nj.at("f").get<int>();
    n.threshold = unhexf(nj.at("t").get<std::string>());
    n.left = nj.at("l").get<int>();
    n.right = nj.at("r").get<int>();
    n.class_counts = nj.at("c").get<std::vector<std::int64_t>>();
    nodes.push_back(std::move(n));
  }
  return tree;
}

std::string criterion_name(SplitCriterion c) {
  return c == SplitCriterion::gini ? "gini" : "infogain";
}

SplitCriterion criterion_from_name(const std::string& s) {
  if (s == "gini") return SplitCriterion::gini;
  if (s == "infogain") return SplitCriterion::information_gain;
  throw ValidationError("unknown split criterion '" + s + "'");
}

ordered_json config_to_json(const LearnerConfig& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["seed"] = c.seed;
  j["tree"] = {{"max_depth", c.tree.max_depth},
               {"min_samples_leaf", c.tree.min_samples_leaf},
               {"criterion", criterion_name(c.tree.criterion)}};
  j["forest"] = {{"tree_count", c.forest.tree_count},
                 {"feature_fraction", hexf(c.forest.feature_fraction)},
                 {"max_depth", c.forest.tree.max_depth},
                 {"min_samples_leaf", c.forest.tree.min_samples_leaf},
                 {"criterion", criterion_name(c.forest.tree.criterion)}};
  j["logistic"] = {{"learning_rate", hexf(c.logistic.learning_rate)},
                   {"epochs", c.logistic.epochs}};
  j["mlp"] = {{"hidden_sizes", c.mlp.hidden_sizes},
              {"activation", activation_to_string(c.mlp.activation)},
              {"learning_rate", hexf(c.mlp.learning_rate)},
              {"epochs", c.mlp.epochs},
              {"batch_size", c.mlp.batch_size}};
  return j;
}

LearnerConfig config_from_json(const ordered_json& j) {
  LearnerConfig c;
  c.kind = model_kind_from_string(j.at("kind").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& t = j.at("tree");
  c.tree.max_depth = t.at("max_depth").get<int>();
  c.tree.min_samples_leaf = t.at("min_samples_leaf").get<int>();
  c.tree.criterion = criterion_from_name(t.at("criterion").get<std::string>());
  const auto& f = j.at("forest");
  c.forest.tree_count = f.at("tree_count").get<int>();
  c.forest.feature_fraction = unhexf(f.at("feature_fraction").get<std::string>());
  c.forest.tree.max_depth = f.at("max_depth").get<int>();
  c.forest.tree.min_samples_leaf = f.at("min_samples_leaf").get<int>();
  c.forest.tree.criterion = criterion_from_name(f.at("criterion").get<std::string>());
  const auto& l = j.at("logistic");
  c.logistic.learning_rate = unhexf(l.at("learning_rate").get<std::string>());
  c.logistic.epochs = l.at("epochs").get<int>();
  const auto& m = j.at("mlp");
  c.mlp.hidden_sizes = m.at("hidden_sizes").get<std::vector<int>>();
  c.mlp.activation = activation_from_string(m.at("activation").get<std::string>());
  c.mlp.learning_rate = unhexf(m.at("learning_rate").get<std::string>());
  c.mlp.epochs = m.at("epochs").get<int>();
  c.mlp.batch_size = m.at("batch_size").get<int>();
  return c;
}

}  // namespace

void save_model(const SavedModel& saved, const std::string& path) {
  ordered_json doc;
  doc["format"] = "anonkit-model";
  doc["version"] = 1;
  doc["features"] = saved.features;
  doc["label_classes"] = saved.label_classes;
  doc["config"] = config_to_json(saved.config);
  doc["class_count"] = saved.model.class_count;
  doc["input_width"] = saved.model.input_width;
  if (saved.model.constant_class) {
    doc["constant_class"] = *saved.model.constant_class;
  } else {
    doc["constant_class"] = nullptr;
  }

  ordered_json body;
  if (!saved.model.constant_class) {
    switch (saved.model.kind) {
      case ModelKind::decision_tree:
        body = tree_to_json(std::get<TreeModel>(saved.model.impl).tree);
        break;
      case ModelKind::random_forest: {
        const auto& forest = std::get<ForestModel>(saved.model.impl);
        ordered_json trees = ordered_json::array();
        for (const auto& t : forest.trees) trees.push_back(tree_to_json(t));
        body["trees"] = std::move(trees);
        body["tree_features"] = forest.tree_features;
        break;
      }
      case ModelKind::logistic_regression: {
        const auto& lm = std::get<LogisticModel>(saved.model.impl);
        body["n_features"] = lm.n_features;
        body["n_classes"] = lm.n_classes;
        body["weights"] = doubles_to_json(lm.weights);
        break;
      }
      case ModelKind::mlp: {
        const auto& mm = std::get<MlpModel>(saved.model.impl);
        body["layer_sizes"] = mm.layer_sizes;
        body["activation"] = activation_to_string(mm.activation);
        ordered_json ws = ordered_json::array();
        for (const auto& w : mm.weights) ws.push_back(doubles_to_json(w));
        ordered_json bs = ordered_json::array();
        for (const auto& b : mm.biases) bs.push_back(doubles_to_json(b));
        body["weights"] = std::move(ws);
        body["biases"] = std::move(bs);
        break;
      }
    }
  }
  doc["model"] = std::move(body);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << doc.dump(1) << "\n";
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ordered_json doc;
  try {
    doc = ordered_json::parse(buf.str());
  } catch (const std::exception& e) {
    throw ValidationError(std::string("model file parse failure: ") + e.what());
  }

  SavedModel saved;
  try {
    if (doc.at("format").get<std::string>() != "anonkit-model") {
      throw ValidationError("not an anonkit model file: " + path);
    }
    if (doc.at("version").get<int>() != 1) {
      throw ValidationError("unsupported model file version in " + path);
    }
    saved.features = doc.at("features").get<std::vector<std::string>>();
    saved.label_classes = doc.at("label_classes").get<std::vector<std::string>>();
    saved.config = config_from_json(doc.at("config"));
    saved.model.kind = saved.config.kind;
    saved.model.class_count = doc.at("class_count").get<int>();
    saved.model.input_width = doc.at("input_width").get<std::size_t>();
    if (!doc.at("constant_class").is_null()) {
      saved.model.constant_class = doc.at("constant_class").get<int>();
      return saved;
    }
    const auto& body = doc.at("model");
    switch (saved.model.kind) {
      case ModelKind::decision_tree:
        saved.model.impl = TreeModel{tree_from_json(body)};
        break;
      case ModelKind::random_forest: {
        ForestModel forest;
        for (const auto& t : body.at("trees")) forest.trees.push_back(tree_from_json(t));
        forest.tree_features = body.at("tree_features").get<std::vector<std::vector<int>>>();
        saved.model.impl = std::move(forest);
        break;
      }
      case ModelKind::logistic_regression: {
        LogisticModel lm;
        lm.n_features = body.at("n_features").get<std::size_t>();
        lm.n_classes = body.at("n_classes").get<int>();
        lm.weights = doubles_from_json(body.at("weights"));
        saved.model.impl = std::move(lm);
        break;
      }
      case ModelKind::mlp: {
        MlpModel mm;
        mm.layer_sizes = body.at("layer_sizes").get<std::vector<int>>();
        mm.activation = activation_from_string(body.at("activation").get<std::string>());
        for (const auto& w : body.at("weights")) mm.weights.push_back(doubles_from_json(w));
        for (const auto& b : body.at("biases")) mm.biases.push_back(doubles_from_json(b));
        saved.model.impl = std::move(mm);
        break;
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("model file parse failure: ") + e.what());
  }
  return saved;
}

}  // namespace anonkit
