// Copyright 2026 The qallab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qallab/data.hpp"
#include "qallab/models.hpp"
#include "qallab/training.hpp"

namespace qallab {

enum class StrategyKind {
  Random,
  LeastConfidence,
  Margin,
  Entropy,
  VotingEntropy,
  DensityWeighted,
  Fidelity,
};

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

struct Strategy {
  StrategyKind kind = StrategyKind::Random;
  double lambda = 0.1;     // Fidelity only
  int committee_size = 3;  // VotingEntropy only

  void validate() const;
};

// Scoring rules. Rows of `probs` are per-sample class distributions; every
// rule returns one score per row. All but the combined fidelity rule are
// maximized.

/// 1 - max_j P(y_j|x).
Eigen::VectorXd score_least_confidence(const Eigen::MatrixXd& probs);
/// -(P(y_1|x) - P(y_2|x)) for the two most probable classes.
Eigen::VectorXd score_margin(const Eigen::MatrixXd& probs);
/// -sum_j P log P, natural log, 0 log 0 = 0.
Eigen::VectorXd score_entropy(const Eigen::MatrixXd& probs);
/// Vote entropy; votes[m][i] is committee member m's label for sample i.
Eigen::VectorXd score_voting_entropy(const std::vector<std::vector<int>>& votes,
                                     int n_classes);
/// (1/U) sum over the other U-1 pool members of the similarity.
Eigen::VectorXd score_density(const Eigen::MatrixXd& similarity);
/// |P(1|x) - 0.5| + (lambda/U) sum_u (1 - Sim(x, x_u)); minimized.
Eigen::VectorXd score_fidelity_combined(const Eigen::MatrixXd& probs,
                                        const Eigen::MatrixXd& similarity,
                                        double lambda);

/// |<psi_i|psi_j>|^2 for every pair of columns.
Eigen::MatrixXd fidelity_matrix(const Amplitudes<double>& states);

/// Position of the best score; ties go to the lowest entry of `ids`.
std::size_t select_max(const Eigen::VectorXd& scores, const std::vector<int>& ids);
std::size_t select_min(const Eigen::VectorXd& scores, const std::vector<int>& ids);

/// Labeled/unlabeled bookkeeping for one campaign.
class PoolState {
 public:
  explicit PoolState(std::vector<int> unlabeled);

  const std::vector<int>& labeled() const { return labeled_; }
  const std::vector<int>& unlabeled() const { return unlabeled_; }
  int budget_used() const { return budget_used_; }

  /// Seeds the labeled set without spending budget.
  void seed_label(int id);
  /// Moves one id from unlabeled to labeled.
  void query(int id);

 private:
  void take(int id);

  std::vector<int> labeled_;
  std::vector<int> unlabeled_;  // ascending
  int budget_used_ = 0;
};

enum class RetrainMode { WarmStart, FromScratch };

struct CampaignConfig {
  ModelSpec model;
  Strategy strategy;
  int budget = 30;
  int epochs_per_round = 50;
  double learning_rate = 0.1;
  UpdateMode update_mode = UpdateMode::FullBatch;
  RetrainMode retrain = RetrainMode::WarmStart;
  bool oracle_init = false;  // start with one labeled sample per class
};

/// One row of a campaign log. query_idx 0 is the state before any query.
struct CampaignRecord {
  std::uint64_t seed = 0;
  std::string strategy;
  int query_idx = 0;
  int sample_id = -1;
  int label = -1;
  Eigen::VectorXd probabilities;  // model output for the queried sample
  double test_acc = 0.0;
  double val_acc = 0.0;
};

/// Pool-based active learning on `data` restricted to `split`. Labels come
/// from the dataset itself (the oracle). Deterministic in (config, seed).
/// Runs one campaign. When `final_params` is given it receives the parameters
/// of every committee member after the last round.
std::vector<CampaignRecord> run_campaign(
    const CampaignConfig& config, const Dataset& data, const SplitDataset& split,
    std::uint64_t seed, std::vector<Eigen::VectorXd>* final_params = nullptr);

}  // namespace qallab
