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

#include "qallab/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qallab {

LossTerms loss_terms(LossKind kind, const Eigen::MatrixXd& expectations,
                     std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != expectations.rows()) {
    throw StructuralError("one label per sample required");
  }
  LossTerms out{0.0, Eigen::MatrixXd::Zero(expectations.rows(),
                                           expectations.cols())};
  for (Index s = 0; s < expectations.rows(); ++s) {
    const int y = labels[static_cast<std::size_t>(s)];
    if (kind == LossKind::BinaryCrossEntropy) {
      if (y != 0 && y != 1) throw StructuralError("BCE labels must be 0 or 1");
      const double p =
          std::clamp((expectations(s, 0) + 1.0) / 2.0, kProbClip,
                     1.0 - kProbClip);
      out.loss -= y == 1 ? std::log(p) : std::log(1.0 - p);
      out.d_expectations(s, 0) = -0.5 * (y == 1 ? 1.0 / p : -1.0 / (1.0 - p));
    } else {
      if (y < 0 || y >= expectations.cols()) {
        throw StructuralError("class label out of range");
      }
      for (Index k = 0; k < expectations.cols(); ++k) {
        const double diff = expectations(s, k) - (k == y ? 1.0 : -1.0);
        out.loss += diff * diff;
        out.d_expectations(s, k) = 2.0 * diff;
      }
    }
  }
  return out;
}

GradientRecord gradient(const Circuit& circuit, const Eigen::VectorXd& params,
                        const Eigen::MatrixXd& features,
                        std::span<const int> labels, LossKind loss) {
  const Index n = features.rows();
  if (n == 0) throw StructuralError("gradient of an empty sample set");
  if (static_cast<Index>(labels.size()) != n) {
    throw StructuralError("one label per sample required");
  }
  for (Index i = 0; i < params.size(); ++i) {
    if (!std::isfinite(params[i])) {
      throw NumericError("non-finite parameter " + std::to_string(i));
    }
  }
  const ExecutionPlan plan(circuit);
  const auto& ops = circuit.operations();
  const auto& segments = plan.segments();
  const Eigen::MatrixXd diag = circuit.observable_diagonals();

  std::size_t first_trainable = segments.size();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int op : segments[s].ops) {
      if (ops[static_cast<std::size_t>(op)].binding.source ==
          Binding::Source::Param) {
        first_trainable = std::min(first_trainable, s);
      }
    }
  }

  GradientRecord rec{0.0, Eigen::VectorXd::Zero(circuit.n_params())};
  for (Index start = 0; start < n; start += kSampleChunk) {
    const Index len = std::min(kSampleChunk, n - start);
    const Eigen::MatrixXd chunk = features.middleRows(start, len);
    Amplitudes<double> phi = plan.run(params, chunk);
    const Eigen::MatrixXd expv = phi.cwiseAbs2().transpose() * diag;
    const LossTerms terms = loss_terms(
        loss, expv, labels.subspan(static_cast<std::size_t>(start),
                                   static_cast<std::size_t>(len)));
    rec.loss += terms.loss;
    // lam = (sum_k dL/dE_k O_k) phi, column by column, pre-scaled by 1/n.
    const Eigen::MatrixXd weights =
        diag * terms.d_expectations.transpose() / static_cast<double>(n);
    Amplitudes<double> lam = phi.cwiseProduct(weights.cast<std::complex<double>>());

    for (std::size_t s = segments.size(); s-- > first_trainable;) {
      const auto& seg = segments[s];
      bool trainable = false;
      for (int op : seg.ops) {
        trainable |= ops[static_cast<std::size_t>(op)].binding.source ==
                     Binding::Source::Param;
      }
      if (trainable) {
        const Mat2<double> corr = kernels::pair_correlation(lam, phi, seg.pairs);
        // Conjugate each generator by the gates that follow it inside the
        // fused segment: after = U_m ... U_{k+1}.
        Mat2<double> after = Mat2<double>::Identity();
        for (std::size_t k = seg.ops.size(); k-- > 0;) {
          const Operation& op = ops[static_cast<std::size_t>(seg.ops[k])];
          if (op.binding.source == Binding::Source::Param) {
            const Mat2<double> g =
                after * pair_generator<double>(op.gate.kind) * after.adjoint();
            const double d = 2.0 * g.cwiseProduct(corr).sum().imag();
            rec.grad(op.binding.index) +=
                d * op.gate.generator_scale * op.binding.scale;
          }
          after = after * pair_matrix<double>(
                              op.gate, plan.angle(seg.ops[k], params, chunk, 0));
        }
      }
      if (s == first_trainable) break;
      plan.apply_segment(s, phi, params, chunk, true);
      plan.apply_segment(s, lam, params, chunk, true);
    }
  }
  rec.loss /= static_cast<double>(n);
  if (!std::isfinite(rec.loss)) throw NumericError("non-finite loss");
  for (Index i = 0; i < rec.grad.size(); ++i) {
    if (!std::isfinite(rec.grad(i))) {
      throw NumericError("non-finite gradient for parameter " +
                         std::to_string(i));
    }
  }
  return rec;
}

std::pair<AdamState, Eigen::VectorXd> adam_step(AdamState state,
                                                Eigen::VectorXd params,
                                                const Eigen::VectorXd& grad) {
  if (params.size() != grad.size() ||
      state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw StructuralError("adam_step: shape mismatch");
  }
  state.step += 1;
  state.first_moment =
      state.beta1 * state.first_moment + (1.0 - state.beta1) * grad;
  state.second_moment = state.beta2 * state.second_moment +
                        (1.0 - state.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, state.step);
  const double c2 = 1.0 - std::pow(state.beta2, state.step);
  params.array() -= state.learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + state.epsilon);
  return {std::move(state), std::move(params)};
}

}  // namespace qallab
