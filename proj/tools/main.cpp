// anonkit command line: k-anonymize tabular training data (accuracy-guided or
// Mondrian), train/apply the built-in learners, verify k-anonymity, run
// inference attacks, and drive config-based experiment sweeps.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure (including a
// failed k-anonymity verification). Diagnostics go to stderr; data and
// reports go to files only.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anonkit/anonymizer.hpp"
#include "anonkit/attacks.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/error.hpp"
#include "anonkit/evaluation.hpp"
#include "anonkit/learners.hpp"
#include "anonkit/mondrian.hpp"
#include "anonkit/qi_presets.hpp"

namespace fs = std::filesystem;
using namespace anonkit;

namespace {

struct QiFlags {
  std::string qi_csv;
  std::string qi_preset;

  std::vector<std::string> resolve() const {
    if (!qi_csv.empty() && !qi_preset.empty()) {
      throw ValidationError("--qi and --qi-preset are mutually exclusive");
    }
    if (!qi_preset.empty()) return qi_presets::by_name(qi_preset);
    if (qi_csv.empty()) throw ValidationError("one of --qi or --qi-preset is required");
    std::vector<std::string> names;
    std::stringstream ss(qi_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
    if (names.empty()) throw ValidationError("--qi list is empty");
    return names;
  }
};

void add_qi_flags(CLI::App* cmd, QiFlags& flags) {
  cmd->add_option("--qi", flags.qi_csv, "Comma-separated quasi-identifier feature names");
  cmd->add_option("--qi-preset", flags.qi_preset,
                  "Named QI set: adult12|adult10|adult8|loan18");
}

SplitCriterion criterion_from_flag(const std::string& name) {
  if (name == "gini") return SplitCriterion::gini;
  if (name == "infogain") return SplitCriterion::information_gain;
  throw ValidationError("--criterion must be gini or infogain");
}

/// Predictions file: single-column RFC-4180 CSV, header `prediction`, values
/// are label class names aligned with the data file's rows.
std::vector<int> load_prediction_labels(const std::string& path, const Schema& schema,
                                        std::size_t expected_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open predictions file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("predictions file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "prediction") {
    throw ValidationError("predictions file must have a single 'prediction' header column");
  }
  std::vector<int> labels;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int cls = schema.label_class_index(line);
    if (cls < 0) {
      throw ValidationError("predictions row " + std::to_string(line_no) +
                            ": unknown class '" + line + "'");
    }
    labels.push_back(cls);
    ++line_no;
  }
  if (labels.size() != expected_rows) {
    throw ValidationError("predictions file has " + std::to_string(labels.size()) +
                          " rows; input data has " + std::to_string(expected_rows));
  }
  return labels;
}

void write_prediction_labels(const std::vector<int>& labels, const Schema& schema,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write predictions file '" + path + "'");
  out << "prediction\n";
  for (int cls : labels) {
    out << schema.label_classes[static_cast<std::size_t>(cls)] << "\n";
  }
}

void report_load_stats(const CsvLoadStats& stats) {
  if (stats.rows_skipped_missing > 0) {
    std::cerr << "note: skipped " << stats.rows_skipped_missing
              << " row(s) with missing values (" << stats.rows_loaded << " loaded)\n";
  }
}

Encoder encoder_for_saved(const SavedModel& saved, const Schema& schema) {
  if (saved.label_classes != schema.label_classes) {
    throw ValidationError("model label classes do not match the schema");
  }
  return Encoder(schema, saved.features);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anonkit: accuracy-guided k-anonymization toolkit"};
  app.require_subcommand(1);

  // ---- anonymize ----
  auto* cmd_anon = app.add_subcommand(
      "anonymize", "Accuracy-guided k-anonymization of a training CSV");
  std::string an_input, an_schema, an_output, an_labels_from, an_tree_out;
  std::string an_criterion = "gini";
  bool an_true_labels = false;
  int an_k = 0;
  std::uint64_t an_seed = 0;
  QiFlags an_qi;
  cmd_anon->add_option("--input", an_input, "Training data CSV")->required();
  cmd_anon->add_option("--schema", an_schema, "Schema JSON")->required();
  cmd_anon->add_option("--output", an_output, "Anonymized CSV path")->required();
  add_qi_flags(cmd_anon, an_qi);
  cmd_anon->add_option("--k", an_k, "k-anonymity parameter (>= 1)")->required();
  cmd_anon->add_option("--seed", an_seed, "Seed (recorded; the algorithm is deterministic)");
  cmd_anon->add_option("--labels-from", an_labels_from,
                       "Predictions CSV guiding the tree (black-box flow)");
  cmd_anon->add_flag("--use-true-labels", an_true_labels,
                     "Guide the tree with the data's own labels");
  cmd_anon->add_option("--criterion", an_criterion, "Split criterion: gini|infogain");
  cmd_anon->add_option("--tree-out", an_tree_out, "Audit JSON for the fitted tree");

  // ---- mondrian ----
  auto* cmd_mon = app.add_subcommand("mondrian", "Median Mondrian k-anonymization baseline");
  std::string mo_input, mo_schema, mo_output;
  int mo_k = 0;
  QiFlags mo_qi;
  cmd_mon->add_option("--input", mo_input, "Training data CSV")->required();
  cmd_mon->add_option("--schema", mo_schema, "Schema JSON")->required();
  cmd_mon->add_option("--output", mo_output, "Anonymized CSV path")->required();
  add_qi_flags(cmd_mon, mo_qi);
  cmd_mon->add_option("--k", mo_k, "k-anonymity parameter (>= 1)")->required();

  // ---- train ----
  auto* cmd_train = app.add_subcommand("train", "Fit a built-in classifier");
  std::string tr_input, tr_schema, tr_learner = "decision_tree", tr_model_out;
  std::string tr_predict_on, tr_predictions_out;
  std::uint64_t tr_seed = 0;
  cmd_train->add_option("--input", tr_input, "Training data CSV")->required();
  cmd_train->add_option("--schema", tr_schema, "Schema JSON")->required();
  cmd_train->add_option("--learner", tr_learner,
                        "decision_tree|random_forest|logistic_regression|mlp_relu_100|"
                        "mlp_tanh_1024_512_256");
  cmd_train->add_option("--seed", tr_seed, "Training seed");
  cmd_train->add_option("--model-out", tr_model_out, "Model JSON path")->required();
  cmd_train->add_option("--predict-on", tr_predict_on,
                        "Also predict on this CSV after training");
  cmd_train->add_option("--predictions-out", tr_predictions_out,
                        "Where to write those predictions");

  // ---- attack-membership ----
  auto* cmd_mem = app.add_subcommand("attack-membership",
                                     "Membership inference attack against a saved model");
  std::string me_model, me_schema, me_members, me_non_members, me_report;
  std::string me_kind = "mlp";
  std::uint64_t me_seed = 0;
  cmd_mem->add_option("--model", me_model, "Target model JSON")->required();
  cmd_mem->add_option("--schema", me_schema, "Schema JSON")->required();
  cmd_mem->add_option("--members", me_members, "CSV of training members")->required();
  cmd_mem->add_option("--non-members", me_non_members, "CSV of non-members")->required();
  cmd_mem->add_option("--attack", me_kind, "Attack model: mlp|random_forest|threshold");
  cmd_mem->add_option("--seed", me_seed, "Attack seed");
  cmd_mem->add_option("--report", me_report, "Attack result JSON path")->required();

  // ---- attack-attribute ----
  auto* cmd_attr = app.add_subcommand("attack-attribute",
                                      "Attribute inference attack against a saved model");
  std::string at_model, at_schema, at_input, at_feature, at_report;
  cmd_attr->add_option("--model", at_model, "Target model JSON")->required();
  cmd_attr->add_option("--schema", at_schema, "Schema JSON")->required();
  cmd_attr->add_option("--input", at_input, "Records to attack (CSV)")->required();
  cmd_attr->add_option("--secret-feature", at_feature, "Categorical feature to infer")->required();
  cmd_attr->add_option("--report", at_report, "Attack result JSON path")->required();

  // ---- verify ----
  auto* cmd_verify = app.add_subcommand("verify", "Independent k-anonymity verification");
  std::string ve_input, ve_schema, ve_report;
  int ve_k = 0;
  QiFlags ve_qi;
  cmd_verify->add_option("--input", ve_input, "Data CSV")->required();
  cmd_verify->add_option("--schema", ve_schema, "Schema JSON")->required();
  add_qi_flags(cmd_verify, ve_qi);
  cmd_verify->add_option("--k", ve_k, "k to verify against (>= 1)")->required();
  cmd_verify->add_option("--report", ve_report, "Verification report JSON path");

  // ---- experiment ----
  auto* cmd_exp = app.add_subcommand("experiment", "Config-driven k-sweep evaluation");
  std::string ex_config, ex_report;
  cmd_exp->add_option("--config", ex_config, "Experiment config JSON")->required();
  cmd_exp->add_option("--report", ex_report, "Report JSONL path")->required();

  // ---- split ----
  auto* cmd_split = app.add_subcommand("split", "Deterministic three-way split");
  std::string sp_input, sp_schema, sp_output, sp_fractions = "0.4,0.4,0.2";
  std::uint64_t sp_seed = 0;
  cmd_split->add_option("--input", sp_input, "Data CSV")->required();
  cmd_split->add_option("--schema", sp_schema, "Schema JSON")->required();
  cmd_split->add_option("--fractions", sp_fractions, "Three fractions summing to 1");
  cmd_split->add_option("--seed", sp_seed, "Shuffle seed");
  cmd_split->add_option("--output", sp_output, "Output prefix (.part1/2/3.csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_anon) {
      if (an_k < 1) throw ValidationError("--k must be >= 1");
      if (an_labels_from.empty() == !an_true_labels) {
        throw ValidationError("exactly one of --labels-from or --use-true-labels is required");
      }
      Schema schema = load_schema(an_schema);
      CsvLoadStats stats;
      Dataset data = load_csv(an_input, schema, &stats);
      report_load_stats(stats);
      AnonymizationConfig config;
      config.k = an_k;
      config.qi = an_qi.resolve();
      config.criterion = criterion_from_flag(an_criterion);
      config.seed = an_seed;
      config.label_source =
          an_true_labels ? LabelSource::true_labels : LabelSource::model_predictions;
      std::vector<int> guide = an_true_labels
                                   ? data.labels
                                   : load_prediction_labels(an_labels_from, schema, data.size());
      AnonymizeResult result = anonymize(data, guide, config);
      write_csv(result.data, an_output);
      if (!an_tree_out.empty()) save_anonymizer_tree(result.tree, an_tree_out);
      std::cerr << "anonymized " << data.size() << " rows into " << result.tree.leaves.size()
                << " groups (k=" << an_k << ")\n";
    } else if (*cmd_mon) {
      if (mo_k < 1) throw ValidationError("--k must be >= 1");
      Schema schema = load_schema(mo_schema);
      CsvLoadStats stats;
      Dataset data = load_csv(mo_input, schema, &stats);
      report_load_stats(stats);
      Dataset result = mondrian_anonymize(data, mo_qi.resolve(), mo_k);
      write_csv(result, mo_output);
      std::cerr << "mondrian-anonymized " << data.size() << " rows (k=" << mo_k << ")\n";
    } else if (*cmd_train) {
      Schema schema = load_schema(tr_schema);
      CsvLoadStats stats;
      Dataset data = load_csv(tr_input, schema, &stats);
      report_load_stats(stats);
      LearnerConfig config = presets::by_name(tr_learner);
      config.seed = tr_seed;
      Encoder encoder(schema);
      SavedModel saved;
      saved.config = config;
      saved.features = encoder.feature_names();
      saved.label_classes = schema.label_classes;
      saved.model = fit(config, encoder.encode(data), data.labels,
                        static_cast<int>(schema.label_classes.size()));
      save_model(saved, tr_model_out);
      std::cerr << "trained " << tr_learner << " on " << data.size() << " rows; accuracy on them "
                << accuracy(saved.model, data, encoder) << "\n";
      if (!tr_predict_on.empty() || !tr_predictions_out.empty()) {
        if (tr_predict_on.empty() || tr_predictions_out.empty()) {
          throw ValidationError("--predict-on and --predictions-out must be given together");
        }
        Dataset other = load_csv(tr_predict_on, schema);
        std::vector<int> preds = predict(saved.model, encoder.encode(other));
        write_prediction_labels(preds, schema, tr_predictions_out);
        std::cerr << "wrote " << preds.size() << " predictions\n";
      }
    } else if (*cmd_mem) {
      Schema schema = load_schema(me_schema);
      SavedModel saved = load_model(me_model);
      Encoder encoder = encoder_for_saved(saved, schema);
      Dataset members = load_csv(me_members, schema);
      Dataset non_members = load_csv(me_non_members, schema);
      // Disjointness is checked on row ids; ids restart per file, so offset.
      for (auto& id : non_members.row_ids) {
        id += static_cast<std::int64_t>(members.size());
      }
      MembershipAttackConfig config;
      config.attack_kind = membership_attack_kind_from_string(me_kind);
      config.seed = me_seed;
      AttackResult result = membership_attack(saved.model, encoder, members, non_members, config);
      std::ofstream out(me_report, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write report '" + me_report + "'");
      out << "{\"attack_accuracy\":" << format_double(result.attack_accuracy)
          << ",\"precision\":" << format_double(result.precision)
          << ",\"recall\":" << format_double(result.recall) << "}\n";
      std::cerr << "membership attack accuracy " << result.attack_accuracy << " precision "
                << result.precision << " recall " << result.recall << "\n";
    } else if (*cmd_attr) {
      Schema schema = load_schema(at_schema);
      SavedModel saved = load_model(at_model);
      Encoder encoder = encoder_for_saved(saved, schema);
      Dataset data = load_csv(at_input, schema);
      AttackResult result = attribute_attack(saved.model, encoder, data, at_feature, {});
      std::ofstream out(at_report, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write report '" + at_report + "'");
      out << "{\"attack_accuracy\":" << format_double(result.attack_accuracy)
          << ",\"precision\":" << format_double(result.precision)
          << ",\"recall\":" << format_double(result.recall) << "}\n";
      std::cerr << "attribute attack accuracy " << result.attack_accuracy << " precision "
                << result.precision << " recall " << result.recall << "\n";
    } else if (*cmd_verify) {
      if (ve_k < 1) throw ValidationError("--k must be >= 1");
      Schema schema = load_schema(ve_schema);
      Dataset data = load_csv(ve_input, schema);
      KAnonymityReport report = verify_k_anonymity(data, ve_qi.resolve(), ve_k);
      if (!ve_report.empty()) {
        std::ofstream out(ve_report, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report '" + ve_report + "'");
        out << k_anonymity_report_to_json(report);
      }
      std::cerr << (report.pass ? "PASS" : "FAIL") << ": min group size "
                << report.min_group_size << " over " << report.group_count
                << " equivalence classes (k=" << ve_k << ")\n";
      for (const auto& [tuple, count] : report.violating_tuples) {
        std::string joined;
        for (const auto& cell : tuple) {
          if (!joined.empty()) joined += "|";
          joined += cell;
        }
        std::cerr << "  violating: (" << joined << ") count " << count << "\n";
      }
      if (!report.pass) return 2;
    } else if (*cmd_exp) {
      ExperimentConfig config = load_experiment_config(ex_config);
      fs::path report_path(ex_report);
      fs::path work_dir = report_path.parent_path() / (report_path.stem().string() + "_artifacts");
      ExperimentOutput output = run_experiment(config, work_dir.string());
      std::ofstream out(ex_report, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write report '" + ex_report + "'");
      out << output.report_jsonl;
      fs::path plot_path = report_path.parent_path() / (report_path.stem().string() + "_plot.csv");
      std::ofstream plot(plot_path, std::ios::binary);
      if (!plot) throw std::runtime_error("cannot write plot data '" + plot_path.string() + "'");
      plot << output.plot_csv;
      std::cerr << "wrote " << output.rows.size() << " report rows to " << ex_report
                << " and plot data to " << plot_path.string() << "\n";
    } else if (*cmd_split) {
      Schema schema = load_schema(sp_schema);
      CsvLoadStats stats;
      Dataset data = load_csv(sp_input, schema, &stats);
      report_load_stats(stats);
      std::array<double, 3> fractions{};
      std::stringstream ss(sp_fractions);
      std::string item;
      std::size_t idx = 0;
      while (std::getline(ss, item, ',') && idx < 3) fractions[idx++] = std::stod(item);
      if (idx != 3) throw ValidationError("--fractions needs three comma-separated values");
      auto parts = split(data, fractions, sp_seed);
      for (int s = 0; s < 3; ++s) {
        std::string path = sp_output + ".part" + std::to_string(s + 1) + ".csv";
        write_csv(parts[static_cast<std::size_t>(s)], path);
        std::cerr << "wrote " << parts[static_cast<std::size_t>(s)].size() << " rows to " << path
                  << "\n";
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
