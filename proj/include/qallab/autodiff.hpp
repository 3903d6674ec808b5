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

#include <span>
#include <utility>

#include "qallab/circuit.hpp"

namespace qallab {

enum class LossKind {
  /// Binary cross-entropy on p = (<O_0> + 1) / 2; labels in {0, 1}.
  BinaryCrossEntropy,
  /// Squared distance between the expectation vector and a +1/-1 one-hot.
  MeanSquaredError,
};

/// Probabilities are clipped to [kProbClip, 1 - kProbClip] inside the log.
inline constexpr double kProbClip = 1e-12;

/// Summed (not averaged) loss and its derivative w.r.t. every expectation.
struct LossTerms {
  double loss = 0.0;
  Eigen::MatrixXd d_expectations;  // same shape as the input
};

LossTerms loss_terms(LossKind kind, const Eigen::MatrixXd& expectations,
                     std::span<const int> labels);

struct GradientRecord {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Mean loss over the rows of `features` and its exact gradient, by adjoint
/// differentiation through the statevector. Shared parameter slots receive
/// the sum of their per-gate contributions.
GradientRecord gradient(const Circuit& circuit, const Eigen::VectorXd& params,
                        const Eigen::MatrixXd& features,
                        std::span<const int> labels, LossKind loss);

struct AdamState {
  int step = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(Index n_params, double lr = 0.1)
      : first_moment(Eigen::VectorXd::Zero(n_params)),
        second_moment(Eigen::VectorXd::Zero(n_params)),
        learning_rate(lr) {}
};

/// One bias-corrected Adam update.
std::pair<AdamState, Eigen::VectorXd> adam_step(AdamState state,
                                                Eigen::VectorXd params,
                                                const Eigen::VectorXd& grad);

}  // namespace qallab
