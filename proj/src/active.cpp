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

#include "qallab/active.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <unordered_map>

#include "qallab/rng.hpp"

namespace qallab {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Random: return "random";
    case StrategyKind::LeastConfidence: return "least_confidence";
    case StrategyKind::Margin: return "margin";
    case StrategyKind::Entropy: return "entropy";
    case StrategyKind::VotingEntropy: return "voting_entropy";
    case StrategyKind::DensityWeighted: return "density_weighted";
    case StrategyKind::Fidelity: return "fidelity";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto k : {StrategyKind::Random, StrategyKind::LeastConfidence,
                 StrategyKind::Margin, StrategyKind::Entropy,
                 StrategyKind::VotingEntropy, StrategyKind::DensityWeighted,
                 StrategyKind::Fidelity}) {
    if (name == to_string(k)) return k;
  }
  throw StructuralError("unknown strategy: " + std::string(name));
}

void Strategy::validate() const {
  if (!(lambda >= 0.0)) throw StructuralError("lambda must be >= 0");
  if (kind == StrategyKind::VotingEntropy && committee_size < 2) {
    throw StructuralError("committee_size must be >= 2");
  }
}

namespace {

void require_rows(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) throw StructuralError("empty pool");
}

}  // namespace

Eigen::VectorXd score_least_confidence(const Eigen::MatrixXd& probs) {
  require_rows(probs);
  return 1.0 - probs.rowwise().maxCoeff().array();
}

Eigen::VectorXd score_margin(const Eigen::MatrixXd& probs) {
  require_rows(probs);
  if (probs.cols() < 2) throw StructuralError("margin needs at least 2 classes");
  Eigen::VectorXd s(probs.rows());
  for (Index r = 0; r < probs.rows(); ++r) {
    double first = -1.0, second = -1.0;
    for (Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(r, k);
      if (p > first) {
        second = first;
        first = p;
      } else if (p > second) {
        second = p;
      }
    }
    s(r) = -(first - second);
  }
  return s;
}

Eigen::VectorXd score_entropy(const Eigen::MatrixXd& probs) {
  require_rows(probs);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(probs.rows());
  for (Index r = 0; r < probs.rows(); ++r) {
    for (Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(r, k);
      if (p > 0.0) s(r) -= p * std::log(p);
    }
  }
  return s;
}

Eigen::VectorXd score_voting_entropy(const std::vector<std::vector<int>>& votes,
                                     int n_classes) {
  if (votes.size() < 2) throw StructuralError("committee needs >= 2 members");
  const std::size_t n = votes[0].size();
  if (n == 0) throw StructuralError("empty pool");
  const double c = static_cast<double>(votes.size());
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Index>(n));
  std::vector<int> tally(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(tally.begin(), tally.end(), 0);
    for (const auto& member : votes) {
      tally.at(static_cast<std::size_t>(member.at(i)))++;
    }
    for (int v : tally) {
      if (v > 0) s(static_cast<Index>(i)) -= v / c * std::log(v / c);
    }
  }
  return s;
}

Eigen::VectorXd score_density(const Eigen::MatrixXd& similarity) {
  require_rows(similarity);
  const double u = static_cast<double>(similarity.rows());
  return (similarity.rowwise().sum() - similarity.diagonal()) / u;
}

Eigen::VectorXd score_fidelity_combined(const Eigen::MatrixXd& probs,
                                        const Eigen::MatrixXd& similarity,
                                        double lambda) {
  require_rows(probs);
  if (probs.cols() != 2) {
    throw StructuralError("fidelity sampling requires a binary model");
  }
  if (similarity.rows() != probs.rows() || similarity.cols() != probs.rows()) {
    throw StructuralError("similarity matrix does not match the pool");
  }
  const double u = static_cast<double>(probs.rows());
  const Eigen::VectorXd dissimilar =
      (1.0 - similarity.array()).matrix().rowwise().sum() -
      (1.0 - similarity.diagonal().array()).matrix();
  return (probs.col(1).array() - 0.5).abs().matrix() + lambda / u * dissimilar;
}

Eigen::MatrixXd fidelity_matrix(const Amplitudes<double>& states) {
  return (states.adjoint() * states).cwiseAbs2();
}

namespace {

template <typename Better>
std::size_t select(const Eigen::VectorXd& scores, const std::vector<int>& ids,
                   Better better) {
  if (scores.size() == 0) throw StructuralError("empty pool");
  if (static_cast<std::size_t>(scores.size()) != ids.size()) {
    throw StructuralError("one score per id required");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const double a = scores(static_cast<Index>(k));
    const double b = scores(static_cast<Index>(best));
    if (better(a, b) || (a == b && ids[k] < ids[best])) best = k;
  }
  return best;
}

}  // namespace

std::size_t select_max(const Eigen::VectorXd& scores, const std::vector<int>& ids) {
  return select(scores, ids, [](double a, double b) { return a > b; });
}

std::size_t select_min(const Eigen::VectorXd& scores, const std::vector<int>& ids) {
  return select(scores, ids, [](double a, double b) { return a < b; });
}

PoolState::PoolState(std::vector<int> unlabeled) : unlabeled_(std::move(unlabeled)) {
  std::sort(unlabeled_.begin(), unlabeled_.end());
  if (std::adjacent_find(unlabeled_.begin(), unlabeled_.end()) != unlabeled_.end()) {
    throw StructuralError("pool ids must be distinct");
  }
}

void PoolState::take(int id) {
  const auto it = std::lower_bound(unlabeled_.begin(), unlabeled_.end(), id);
  if (it == unlabeled_.end() || *it != id) {
    throw StructuralError("sample " + std::to_string(id) + " is not in the unlabeled pool");
  }
  unlabeled_.erase(it);
  labeled_.push_back(id);
}

void PoolState::seed_label(int id) { take(id); }

void PoolState::query(int id) {
  take(id);
  ++budget_used_;
}

namespace {

/// Models trained side by side; a single member unless voting.
struct Ensemble {
  std::vector<Eigen::VectorXd> params;

  std::vector<int> predict(const Model& model, const Eigen::MatrixXd& x) const {
    if (params.size() == 1) return model.predict_labels(params[0], x);
    std::vector<std::vector<int>> votes;
    for (const auto& p : params) votes.push_back(model.predict_labels(p, x));
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    std::vector<int> tally(static_cast<std::size_t>(model.n_classes()));
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::fill(tally.begin(), tally.end(), 0);
      for (const auto& v : votes) tally[static_cast<std::size_t>(v[i])]++;
      out[i] = static_cast<int>(std::max_element(tally.begin(), tally.end()) -
                                tally.begin());
    }
    return out;
  }

  double accuracy(const Model& model, const Dataset& d) const {
    if (d.size() == 0) return 0.0;
    const std::vector<int> p = predict(model, d.features);
    Index hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += p[i] == d.labels[i];
    return static_cast<double>(hits) / static_cast<double>(d.size());
  }
};

}  // namespace

std::vector<CampaignRecord> run_campaign(
    const CampaignConfig& config, const Dataset& data, const SplitDataset& split,
    std::uint64_t seed, std::vector<Eigen::VectorXd>* final_params) {
  config.strategy.validate();
  const Model model(config.model);
  if (model.n_features() != data.features.cols()) {
    throw StructuralError("model expects " + std::to_string(model.n_features()) +
                          " features, dataset has " +
                          std::to_string(data.features.cols()));
  }
  const StrategyKind kind = config.strategy.kind;
  if (kind == StrategyKind::Fidelity && model.n_classes() != 2) {
    throw StructuralError("fidelity sampling requires a binary model");
  }
  const std::string label = std::string(to_string(kind)) +
                            (config.oracle_init ? "+oracle" : "");
  const Dataset validation = data.subset(split.validation);
  const Dataset test = data.subset(split.test);
  const TrainConfig train_cfg{config.epochs_per_round, config.learning_rate,
                              config.update_mode};

  Rng init_rng(derive_seed(seed, 1));
  Rng query_rng(derive_seed(seed, 2));
  const int members =
      kind == StrategyKind::VotingEntropy ? config.strategy.committee_size : 1;
  Ensemble ensemble;
  for (int m = 0; m < members; ++m) {
    ensemble.params.push_back(init_params(model.n_params(), init_rng));
  }

  PoolState pool(split.pool);

  // Pairwise encoded-state fidelities over the whole pool.
  Eigen::MatrixXd pool_similarity;
  std::unordered_map<int, Index> pool_pos;
  if (kind == StrategyKind::DensityWeighted || kind == StrategyKind::Fidelity) {
    const std::vector<int>& ids = pool.unlabeled();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      pool_pos[ids[k]] = static_cast<Index>(k);
    }
    pool_similarity = fidelity_matrix(model.encode(data.subset(ids).features));
  }

  const auto retrain = [&] {
    const Dataset labeled = data.subset(pool.labeled());
    for (auto& p : ensemble.params) {
      Eigen::VectorXd start = config.retrain == RetrainMode::WarmStart
                                  ? p
                                  : init_params(model.n_params(), init_rng);
      p = train(model, std::move(start), labeled, validation, train_cfg).best_params;
    }
  };

  if (config.oracle_init) {
    for (int c = 0; c < model.n_classes(); ++c) {
      std::vector<int> candidates;
      for (int id : pool.unlabeled()) {
        if (data.labels[static_cast<std::size_t>(id)] == c) candidates.push_back(id);
      }
      if (candidates.empty()) {
        throw StructuralError("oracle_init: class " + std::to_string(c) +
                              " is absent from the pool");
      }
      pool.seed_label(candidates[static_cast<std::size_t>(
          query_rng.below(candidates.size()))]);
    }
    retrain();
  }

  std::vector<CampaignRecord> log;
  const auto record = [&](int query_idx, int id, Eigen::VectorXd probs) {
    CampaignRecord r;
    r.seed = seed;
    r.strategy = label;
    r.query_idx = query_idx;
    r.sample_id = id;
    r.label = id >= 0 ? data.labels[static_cast<std::size_t>(id)] : -1;
    r.probabilities = std::move(probs);
    r.test_acc = ensemble.accuracy(model, test);
    r.val_acc = ensemble.accuracy(model, validation);
    log.push_back(std::move(r));
  };
  record(0, -1, Eigen::VectorXd());

  int budget = config.budget;
  const int available = static_cast<int>(pool.unlabeled().size());
  if (budget > available) {
    std::cerr << "warning: budget " << budget << " exceeds pool size "
              << available << "; clipped\n";
    budget = available;
  }

  for (int q = 1; q <= budget; ++q) {
    const std::vector<int>& ids = pool.unlabeled();
    const Eigen::MatrixXd x = data.subset(ids).features;
    const Eigen::MatrixXd probs = model.probabilities(ensemble.params[0], x);
    std::size_t pick = 0;
    switch (kind) {
      case StrategyKind::Random:
        pick = static_cast<std::size_t>(query_rng.below(ids.size()));
        break;
      case StrategyKind::LeastConfidence:
        pick = select_max(score_least_confidence(probs), ids);
        break;
      case StrategyKind::Margin:
        pick = select_max(score_margin(probs), ids);
        break;
      case StrategyKind::Entropy:
        pick = select_max(score_entropy(probs), ids);
        break;
      case StrategyKind::VotingEntropy: {
        std::vector<std::vector<int>> votes;
        for (const auto& p : ensemble.params) votes.push_back(model.predict_labels(p, x));
        pick = select_max(score_voting_entropy(votes, model.n_classes()), ids);
        break;
      }
      case StrategyKind::DensityWeighted:
      case StrategyKind::Fidelity: {
        std::vector<Index> pos;
        for (int id : ids) pos.push_back(pool_pos.at(id));
        const Eigen::MatrixXd sim = pool_similarity(pos, pos);
        pick = kind == StrategyKind::DensityWeighted
                   ? select_max(score_density(sim), ids)
                   : select_min(score_fidelity_combined(probs, sim,
                                                        config.strategy.lambda),
                                ids);
        break;
      }
    }
    const int id = ids[pick];
    Eigen::VectorXd picked = probs.row(static_cast<Index>(pick)).transpose();
    pool.query(id);
    retrain();
    record(q, id, std::move(picked));
  }
  if (final_params) *final_params = ensemble.params;
  return log;
}

}  // namespace qallab
