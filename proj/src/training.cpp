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

#include "qallab/training.hpp"

#include <numbers>
#include <string>
#include <tuple>

namespace qallab {

UpdateMode parse_update_mode(std::string_view name) {
  if (name == "full_batch") return UpdateMode::FullBatch;
  if (name == "online") return UpdateMode::Online;
  throw StructuralError("unknown update_mode: " + std::string(name));
}

std::string_view to_string(UpdateMode mode) {
  return mode == UpdateMode::FullBatch ? "full_batch" : "online";
}

Eigen::VectorXd init_params(int n, Rng& rng) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    p(i) = rng.uniform(-std::numbers::pi, std::numbers::pi);
  }
  return p;
}

TrainResult train(const Model& model, Eigen::VectorXd params,
                  const Dataset& train_set, const Dataset& validation,
                  const TrainConfig& config) {
  if (params.size() != model.n_params()) {
    throw StructuralError("train: parameter count mismatch");
  }
  TrainResult out;
  out.best_params = params;
  out.best_val_acc = model.accuracy(params, validation.features, validation.labels);
  if (train_set.size() == 0) {
    out.final_params = params;
    return out;
  }
  AdamState adam(params.size(), config.learning_rate);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.mode == UpdateMode::FullBatch) {
      const GradientRecord g = gradient(model.circuit(), params,
                                        train_set.features, train_set.labels,
                                        model.loss());
      out.losses.push_back(g.loss);
      std::tie(adam, params) = adam_step(std::move(adam), std::move(params), g.grad);
    } else {
      double total = 0.0;
      for (Index s = 0; s < train_set.size(); ++s) {
        const Eigen::MatrixXd row = train_set.features.row(s);
        const int label = train_set.labels[static_cast<std::size_t>(s)];
        const GradientRecord g = gradient(model.circuit(), params, row,
                                          std::span<const int>(&label, 1),
                                          model.loss());
        total += g.loss;
        std::tie(adam, params) =
            adam_step(std::move(adam), std::move(params), g.grad);
      }
      out.losses.push_back(total / static_cast<double>(train_set.size()));
    }
    const double acc =
        model.accuracy(params, validation.features, validation.labels);
    // The checkpoint is the best trained epoch, so a retraining round always
    // reflects the current training set.
    if (epoch == 1 || acc > out.best_val_acc) {
      out.best_val_acc = acc;
      out.best_params = params;
      out.best_epoch = epoch;
    }
  }
  out.final_params = std::move(params);
  return out;
}

}  // namespace qallab
