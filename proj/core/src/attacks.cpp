#include "anonkit/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "anonkit/error.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

std::string to_string(MembershipAttackKind k) {
  switch (k) {
    case MembershipAttackKind::mlp: return "mlp";
    case MembershipAttackKind::random_forest: return "random_forest";
    case MembershipAttackKind::threshold: return "threshold";
  }
  return "?";
}

MembershipAttackKind membership_attack_kind_from_string(const std::string& s) {
  if (s == "mlp") return MembershipAttackKind::mlp;
  if (s == "random_forest") return MembershipAttackKind::random_forest;
  if (s == "threshold") return MembershipAttackKind::threshold;
  throw ValidationError("unknown attack kind '" + s + "'");
}

namespace {

void check_attack_inputs(const Dataset& members, const Dataset& non_members) {
  if (members.size() == 0 || non_members.size() == 0) {
    throw ValidationError("membership attack needs nonempty member and non-member sets");
  }
  if (!(members.schema == non_members.schema)) {
    throw ValidationError("member and non-member sets have different schemas");
  }
  std::unordered_set<std::int64_t> ids(members.row_ids.begin(), members.row_ids.end());
  for (std::int64_t id : non_members.row_ids) {
    if (ids.count(id)) {
      throw ValidationError("member and non-member sets overlap (row_id " + std::to_string(id) +
                            ")");
    }
  }
}

/// Attack feature vector for one record: target score vector (sorted
/// descending when configured) concatenated with the one-hot true label.
void append_attack_features(std::vector<double>& out, std::vector<double> scores, int label,
                            int class_count, bool sort_scores) {
  if (sort_scores) std::sort(scores.begin(), scores.end(), std::greater<double>());
  out.insert(out.end(), scores.begin(), scores.end());
  for (int c = 0; c < class_count; ++c) out.push_back(c == label ? 1.0 : 0.0);
}

}  // namespace

MembershipAttackData build_membership_attack_data(const ClassificationModel& target,
                                                  const Encoder& encoder, const Dataset& members,
                                                  const Dataset& non_members,
                                                  const MembershipAttackConfig& config) {
  check_attack_inputs(members, non_members);
  Rng rng(derive_seed(config.seed, 0xa77ac4));

  // Balance to exactly 50/50 by subsampling the larger side.
  std::size_t take = std::min(members.size(), non_members.size());
  auto pick = [&](std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    order.resize(take);
    return order;
  };
  std::vector<std::size_t> member_rows = pick(members.size());
  std::vector<std::size_t> non_member_rows = pick(non_members.size());

  EncodedMatrix member_X = encoder.encode(members);
  EncodedMatrix non_member_X = encoder.encode(non_members);
  int class_count = target.class_count;

  MembershipAttackData data;
  data.features.n_rows = 2 * take;
  data.features.n_cols = static_cast<std::size_t>(2 * class_count);
  data.features.values.reserve(data.features.n_rows * data.features.n_cols);
  for (int c = 0; c < class_count; ++c) {
    data.features.columns.push_back(EncodedColumn{-1, -1, "score_" + std::to_string(c)});
  }
  for (int c = 0; c < class_count; ++c) {
    data.features.columns.push_back(EncodedColumn{-1, -1, "label_" + std::to_string(c)});
  }

  auto add_records = [&](const EncodedMatrix& X, const Dataset& d,
                         const std::vector<std::size_t>& rows, int member_flag) {
    for (std::size_t r : rows) {
      append_attack_features(data.features.values, target.score_row(X.row(r)), d.labels[r],
                             class_count, config.sort_scores);
      data.is_member.push_back(member_flag);
    }
  };
  add_records(member_X, members, member_rows, 1);
  add_records(non_member_X, non_members, non_member_rows, 0);
  data.features.row_ids.resize(data.features.n_rows);
  std::iota(data.features.row_ids.begin(), data.features.row_ids.end(), 0);

  // Stratified 50/50 split: half of each side trains the attack model, the
  // other half grades it.
  std::vector<std::size_t> member_pos(take), non_member_pos(take);
  std::iota(member_pos.begin(), member_pos.end(), 0);
  std::iota(non_member_pos.begin(), non_member_pos.end(), take);
  rng.shuffle(member_pos);
  rng.shuffle(non_member_pos);
  std::size_t half = take / 2;
  for (std::size_t i = 0; i < take; ++i) {
    (i < half ? data.train_rows : data.test_rows).push_back(member_pos[i]);
    (i < half ? data.train_rows : data.test_rows).push_back(non_member_pos[i]);
  }
  return data;
}

namespace {

EncodedMatrix take_matrix_rows(const EncodedMatrix& X, const std::vector<std::size_t>& rows) {
  EncodedMatrix out;
  out.n_rows = rows.size();
  out.n_cols = X.n_cols;
  out.columns = X.columns;
  out.values.reserve(out.n_rows * out.n_cols);
  for (std::size_t r : rows) {
    auto row = X.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  out.row_ids.resize(out.n_rows);
  std::iota(out.row_ids.begin(), out.row_ids.end(), 0);
  return out;
}

AttackResult score_confusion(const std::vector<int>& truth, const std::vector<int>& guess,
                             int positive) {
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (guess[i] == truth[i]) ++correct;
    if (guess[i] == positive && truth[i] == positive) ++tp;
    if (guess[i] == positive && truth[i] != positive) ++fp;
    if (guess[i] != positive && truth[i] == positive) ++fn;
  }
  AttackResult r;
  r.attack_accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  r.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return r;
}

/// Assumption-free baseline: one threshold on the max score, oriented and
/// placed to maximize attack-train accuracy.
std::vector<int> threshold_attack_predict(const EncodedMatrix& features,
                                          const std::vector<int>& is_member,
                                          const std::vector<std::size_t>& train_rows,
                                          const std::vector<std::size_t>& test_rows,
                                          int class_count) {
  auto max_score = [&](std::size_t r) {
    double mx = features.at(r, 0);
    for (int c = 1; c < class_count; ++c) {
      mx = std::max(mx, features.at(r, static_cast<std::size_t>(c)));
    }
    return mx;
  };
  std::vector<double> train_scores;
  train_scores.reserve(train_rows.size());
  for (std::size_t r : train_rows) train_scores.push_back(max_score(r));
  std::vector<double> distinct = train_scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates{distinct.front() - 1.0};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    candidates.push_back((distinct[i] + distinct[i + 1]) / 2.0);
  }
  candidates.push_back(distinct.back() + 1.0);

  double best_acc = -1.0, best_threshold = candidates.front();
  bool best_above_is_member = true;
  for (double t : candidates) {
    for (bool above : {true, false}) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        int guess = (train_scores[i] >= t) == above ? 1 : 0;
        if (guess == is_member[train_rows[i]]) ++correct;
      }
      double acc = static_cast<double>(correct) / static_cast<double>(train_rows.size());
      if (acc > best_acc + 1e-12) {
        best_acc = acc;
        best_threshold = t;
        best_above_is_member = above;
      }
    }
  }
  std::vector<int> guesses;
  guesses.reserve(test_rows.size());
  for (std::size_t r : test_rows) {
    guesses.push_back((max_score(r) >= best_threshold) == best_above_is_member ? 1 : 0);
  }
  return guesses;
}

}  // namespace

AttackResult membership_attack(const ClassificationModel& target, const Encoder& encoder,
                               const Dataset& members, const Dataset& non_members,
                               const MembershipAttackConfig& config) {
  MembershipAttackData data =
      build_membership_attack_data(target, encoder, members, non_members, config);

  std::vector<int> truth;
  truth.reserve(data.test_rows.size());
  for (std::size_t r : data.test_rows) truth.push_back(data.is_member[r]);

  std::vector<int> guesses;
  if (config.attack_kind == MembershipAttackKind::threshold) {
    guesses = threshold_attack_predict(data.features, data.is_member, data.train_rows,
                                       data.test_rows, target.class_count);
  } else {
    LearnerConfig attacker;
    attacker.seed = derive_seed(config.seed, 0x66697400);
    if (config.attack_kind == MembershipAttackKind::mlp) {
      attacker.kind = ModelKind::mlp;
      std::vector<int> hidden = config.mlp_hidden;
      attacker.mlp.hidden_sizes = hidden;
      attacker.mlp.activation = Activation::relu;
      attacker.mlp.learning_rate = config.mlp_learning_rate;
      attacker.mlp.epochs = config.mlp_epochs;
      attacker.mlp.batch_size = config.mlp_batch_size;
    } else {
      attacker.kind = ModelKind::random_forest;
      attacker.forest.tree_count = config.forest_trees;
    }
    EncodedMatrix train_X = take_matrix_rows(data.features, data.train_rows);
    std::vector<int> train_y;
    train_y.reserve(data.train_rows.size());
    for (std::size_t r : data.train_rows) train_y.push_back(data.is_member[r]);
    ClassificationModel attack_model = fit(attacker, train_X, train_y, 2);
    EncodedMatrix test_X = take_matrix_rows(data.features, data.test_rows);
    guesses = predict(attack_model, test_X);
  }
  return score_confusion(truth, guesses, /*positive=*/1);
}

AttackResult attribute_attack(const ClassificationModel& target, const Encoder& encoder,
                              const Dataset& data, const std::string& secret_feature,
                              const AttributeAttackConfig& config) {
  (void)config;  // the attack is deterministic; the seed exists for interface parity
  if (data.size() == 0) throw ValidationError("attribute attack needs a nonempty dataset");
  int f = data.schema.feature_index(secret_feature);
  if (f < 0) throw ValidationError("secret feature '" + secret_feature + "' not in schema");
  const FeatureSpec& spec = data.schema.features[static_cast<std::size_t>(f)];
  if (!spec.is_categorical()) {
    throw ValidationError("secret feature '" + secret_feature + "' must be categorical");
  }
  bool encoded = std::find(encoder.feature_indices().begin(), encoder.feature_indices().end(), f) !=
                 encoder.feature_indices().end();
  if (!encoded) {
    throw ValidationError("secret feature '" + secret_feature +
                          "' is not an input feature of the target model");
  }

  std::size_t n_cat = spec.categories.size();
  std::vector<int> truth(data.size()), guess(data.size());

  // One candidate dataset per category: every record with the secret forced
  // to that value. The true secret value never enters any query.
  Dataset candidate = data;
  std::vector<std::vector<std::vector<double>>> candidate_scores(n_cat);
  for (std::size_t c = 0; c < n_cat; ++c) {
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      candidate.rows[i][static_cast<std::size_t>(f)] = static_cast<double>(c);
    }
    candidate_scores[c] = predict_scores(target, encoder.encode(candidate));
  }

  for (std::size_t i = 0; i < data.size(); ++i) {
    truth[i] = data.category(i, static_cast<std::size_t>(f));
    auto y = static_cast<std::size_t>(data.labels[i]);
    std::size_t best = 0;
    double best_score = candidate_scores[0][i][y];
    for (std::size_t c = 1; c < n_cat; ++c) {
      if (candidate_scores[c][i][y] > best_score) {  // ties keep the lowest index
        best_score = candidate_scores[c][i][y];
        best = c;
      }
    }
    guess[i] = static_cast<int>(best);
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (guess[i] == truth[i]) ++correct;
  }

  // Macro precision/recall over categories present in the data.
  std::vector<std::size_t> tp(n_cat, 0), fp(n_cat, 0), actual(n_cat, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++actual[static_cast<std::size_t>(truth[i])];
    if (guess[i] == truth[i]) ++tp[static_cast<std::size_t>(guess[i])];
    else ++fp[static_cast<std::size_t>(guess[i])];
  }
  double precision_sum = 0.0, recall_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_cat; ++c) {
    if (actual[c] == 0) continue;
    ++present;
    std::size_t guessed = tp[c] + fp[c];
    precision_sum += guessed ? static_cast<double>(tp[c]) / static_cast<double>(guessed) : 0.0;
    recall_sum += static_cast<double>(tp[c]) / static_cast<double>(actual[c]);
  }

  AttackResult result;
  result.attack_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  result.precision = present ? precision_sum / static_cast<double>(present) : 0.0;
  result.recall = present ? recall_sum / static_cast<double>(present) : 0.0;
  return result;
}

}  // namespace anonkit
