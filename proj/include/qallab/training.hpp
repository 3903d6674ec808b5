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

#include <string_view>
#include <vector>

#include "qallab/data.hpp"
#include "qallab/models.hpp"
#include "qallab/rng.hpp"

namespace qallab {

/// How an epoch consumes the training set.
enum class UpdateMode {
  FullBatch,  // one Adam step on the mean gradient
  Online,     // one Adam step per sample, in training-set order
};

UpdateMode parse_update_mode(std::string_view name);
std::string_view to_string(UpdateMode mode);

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.1;
  UpdateMode mode = UpdateMode::FullBatch;
};

struct TrainResult {
  Eigen::VectorXd best_params;  // parameters at the best validation accuracy
  double best_val_acc = 0.0;
  int best_epoch = 0;           // 0 = untrained (empty set or zero epochs)
  Eigen::VectorXd final_params;
  std::vector<double> losses;   // training loss before each epoch's update
};

/// Parameters drawn from Uniform[-pi, pi).
Eigen::VectorXd init_params(int n, Rng& rng);

/// Adam training with best-validation checkpointing over the trained epochs.
/// Epoch 1 seeds the checkpoint and later epochs replace it only on strict
/// improvement. The starting parameters are returned only when nothing is
/// trained.
TrainResult train(const Model& model, Eigen::VectorXd params,
                  const Dataset& train_set, const Dataset& validation,
                  const TrainConfig& config);

}  // namespace qallab
