#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anonkit/dataset.hpp"
#include "anonkit/encode.hpp"
#include "anonkit/learners.hpp"

namespace anonkit {

enum class MembershipAttackKind { mlp, random_forest, threshold };

std::string to_string(MembershipAttackKind k);
MembershipAttackKind membership_attack_kind_from_string(const std::string& s);

struct MembershipAttackConfig {
  MembershipAttackKind attack_kind = MembershipAttackKind::mlp;
  /// Hidden a layer of 64 units by default; ignored by the threshold attack.
  std::vector<int> mlp_hidden{64};
  int mlp_epochs = 80;
  int mlp_batch_size = 32;
  double mlp_learning_rate = 1e-3;
  int forest_trees = 100;
  /// Sort the target's score vector (removes class-identity signal). A
  /// deviation knob: unsorted keeps per-class positions.
  bool sort_scores = true;
  std::uint64_t seed = 0;
};

/// Accuracy / precision / recall with "member" (or the secret value) as the
/// positive side; derived from one confusion matrix.
struct AttackResult {
  double attack_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Internal stages exposed for testing: balanced, feature-built attack data
/// with its stratified train/test split.
struct MembershipAttackData {
  EncodedMatrix features;        // [sorted f(x) || one-hot y] per record
  std::vector<int> is_member;    // 1 = member
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

MembershipAttackData build_membership_attack_data(const ClassificationModel& target,
                                                  const Encoder& encoder, const Dataset& members,
                                                  const Dataset& non_members,
                                                  const MembershipAttackConfig& config);

/// Strong membership inference: the adversary knows candidate records and
/// their true labels, queries the target for score vectors, and trains an
/// attack model to separate members from non-members. Balanced 50/50 by
/// subsampling the larger side; metrics come from records the attack model
/// never saw during fitting.
AttackResult membership_attack(const ClassificationModel& target, const Encoder& encoder,
                               const Dataset& members, const Dataset& non_members,
                               const MembershipAttackConfig& config);

struct AttributeAttackConfig {
  std::uint64_t seed = 0;
};

/// Attribute inference (model inversion): for each record, try every
/// candidate value of the secret categorical feature, query the target, and
/// guess the candidate that maximizes the score of the record's true label
/// (ties -> lowest category index). The secret's true value is used only to
/// grade the guess. Precision/recall are macro-averaged over the secret's
/// categories present in the data (absent denominators count as zero).
AttackResult attribute_attack(const ClassificationModel& target, const Encoder& encoder,
                              const Dataset& data, const std::string& secret_feature,
                              const AttributeAttackConfig& config);

}  // namespace anonkit
