#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anonkit/anonymizer.hpp"
#include "anonkit/attacks.hpp"
#include "anonkit/dataset.hpp"

namespace anonkit {

struct KAnonymityReport {
  int k_requested = 0;
  std::size_t min_group_size = 0;
  std::size_t group_count = 0;
  /// QI tuples (rendered as cell text) with counts below k; empty when passing.
  std::vector<std::pair<std::vector<std::string>, std::size_t>> violating_tuples;
  bool pass = false;
};

/// Exact group-by over the QI value tuples. Independent of any anonymizer
/// internals: this is the oracle the anonymizers are judged against.
KAnonymityReport verify_k_anonymity(const Dataset& data, const std::vector<std::string>& qi,
                                    int k);

struct EquivalenceClassStats {
  std::size_t group_count = 0;
  std::size_t min_size = 0;
  double mean_size = 0.0;
  std::size_t max_size = 0;
};

EquivalenceClassStats equivalence_class_stats(const Dataset& data,
                                              const std::vector<std::string>& qi);

std::string k_anonymity_report_to_json(const KAnonymityReport& report);

enum class AnonymizationMethod { accuracy_guided, mondrian };
std::string to_string(AnonymizationMethod m);

struct ExperimentAttacks {
  bool membership = false;
  std::optional<std::string> attribute_feature;
  MembershipAttackKind attack_kind = MembershipAttackKind::mlp;
};

/// Parsed experiment config (JSON; see README for the schema). Validation
/// collects every error before any run starts.
struct ExperimentConfig {
  std::string dataset_path;
  std::string schema_path;
  std::vector<std::string> qi;  // resolved from qi_list or qi_preset
  std::vector<int> ks;
  std::vector<AnonymizationMethod> methods;
  std::vector<std::string> learners;  // preset names
  LabelSource label_source = LabelSource::model_predictions;
  ExperimentAttacks attacks;
  std::vector<std::uint64_t> seeds{0};
  std::size_t subsample = 10000;  // 0 = full dataset
  std::array<double, 3> fractions{0.4, 0.4, 0.2};
  std::optional<std::size_t> feature_selection_m;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir);

/// One report row: a (dataset, learner, method, k) cell aggregated over the
/// config's seeds. Accuracies are means; stddevs accompany them when more
/// than one seed ran. Every row embeds a passing verification (a failing one
/// aborts the row instead of reporting silently). Wall-clock timings are
/// diagnostics only and never enter the report file.
struct EvaluationReport {
  std::string dataset;
  std::string learner;
  std::string method;
  std::vector<std::string> qi;
  int k = 0;
  std::string label_source;
  std::vector<std::uint64_t> seeds;
  double baseline_accuracy = 0.0;
  double baseline_accuracy_stddev = 0.0;
  double anonymized_accuracy = 0.0;
  double anonymized_accuracy_stddev = 0.0;
  KAnonymityReport verification;
  std::optional<AttackResult> membership_attack_original;
  std::optional<AttackResult> membership_attack_retrained;
  std::optional<AttackResult> attribute_attack_original;
  std::optional<AttackResult> attribute_attack_retrained;
};

std::string evaluation_report_to_json(const EvaluationReport& report);

struct ExperimentOutput {
  std::vector<EvaluationReport> rows;
  std::string report_jsonl;  // one row per line
  std::string plot_csv;      // method,k,accuracy
};

/// Runs every (learner, k, method) cell over the config's seeds. Anonymized
/// datasets are serialized to CSV and reloaded before verification, so the
/// artifact that would ship is what is proven k-anonymous.
ExperimentOutput run_experiment(const ExperimentConfig& config, const std::string& work_dir);

}  // namespace anonkit
