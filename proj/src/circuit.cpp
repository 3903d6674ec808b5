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

#include "qallab/circuit.hpp"

#include <string>

namespace qallab {

Circuit::Circuit(int n_qubits, int n_params, int n_features)
    : n_qubits_(n_qubits), n_params_(n_params), n_features_(n_features) {
  if (n_qubits < 1) throw StructuralError("qubit count must be >= 1");
  if (n_qubits > kMaxQubits) {
    throw CapabilityError("at most " + std::to_string(kMaxQubits) +
                          " qubits are supported");
  }
  if (n_params < 0 || n_features < 0) {
    throw StructuralError("parameter and feature counts must be >= 0");
  }
}

Circuit& Circuit::add(Gate gate, Binding binding) {
  validate(gate, n_qubits_);
  if (is_parameterized(gate.kind)) {
    if (binding.source == Binding::Source::Param &&
        (binding.index < 0 || binding.index >= n_params_)) {
      throw StructuralError("parameter slot out of range");
    }
    if (binding.source == Binding::Source::Feature &&
        (binding.index < 0 || binding.index >= n_features_)) {
      throw StructuralError("feature index out of range");
    }
  } else if (binding.source != Binding::Source::Fixed) {
    throw StructuralError(std::string(to_string(gate.kind)) +
                          " takes no angle binding");
  }
  ops_.push_back({std::move(gate), binding});
  return *this;
}

Circuit& Circuit::add_observable(Observable obs) {
  obs.diagonal(n_qubits_);  // validates supports
  observables_.push_back(std::move(obs));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ != n_qubits_ || other.n_params_ > n_params_ ||
      other.n_features_ > n_features_) {
    throw StructuralError("appended circuit does not fit");
  }
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  return *this;
}

Eigen::MatrixXd Circuit::observable_diagonals() const {
  Eigen::MatrixXd d(Index{1} << n_qubits_,
                    static_cast<Index>(observables_.size()));
  for (std::size_t k = 0; k < observables_.size(); ++k) {
    d.col(static_cast<Index>(k)) = observables_[k].diagonal(n_qubits_);
  }
  return d;
}

namespace {

bool fusable(const Operation& op) {
  return op.gate.kind == GateKind::RX || op.gate.kind == GateKind::RY ||
         op.gate.kind == GateKind::RZ || op.gate.kind == GateKind::H;
}

bool feature_bound(const Operation& op) {
  return op.binding.source == Binding::Source::Feature;
}

std::vector<int> inverse_images(const std::vector<int>& images) {
  std::vector<int> inv(images.size());
  for (std::size_t q = 0; q < images.size(); ++q) {
    inv[static_cast<std::size_t>(images[q])] = static_cast<int>(q);
  }
  return inv;
}

}  // namespace

ExecutionPlan::ExecutionPlan(const Circuit& circuit) : circuit_(&circuit) {
  const auto& ops = circuit.operations();
  for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
    const Operation& op = ops[static_cast<std::size_t>(k)];
    if (!segments_.empty() && fusable(op)) {
      Segment& last = segments_.back();
      const Operation& prev =
          ops[static_cast<std::size_t>(last.ops.back())];
      if (!last.permutation && fusable(prev) &&
          prev.gate.qubits[0] == op.gate.qubits[0] &&
          feature_bound(prev) == feature_bound(op)) {
        last.ops.push_back(k);
        continue;
      }
    }
    Segment seg;
    seg.permutation = op.gate.kind == GateKind::PERM;
    if (!seg.permutation) seg.pairs = pair_spec(op.gate);
    seg.columnwise = feature_bound(op);
    seg.ops.push_back(k);
    segments_.push_back(std::move(seg));
  }
}

double ExecutionPlan::angle(int op, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& features, Index row) const {
  const Binding& b = circuit_->operations()[static_cast<std::size_t>(op)].binding;
  switch (b.source) {
    case Binding::Source::Fixed:
      return b.value;
    case Binding::Source::Param:
      return b.scale * params[static_cast<std::size_t>(b.index)];
    case Binding::Source::Feature:
      return b.scale * features(row, b.index);
  }
  return 0.0;
}

Mat2<double> ExecutionPlan::segment_matrix(std::size_t s,
                                           const Eigen::VectorXd& params,
                                           const Eigen::MatrixXd& features,
                                           Index row) const {
  const Segment& seg = segments_[s];
  Mat2<double> m = Mat2<double>::Identity();
  for (int op : seg.ops) {
    const double a = angle(op, params, features, row);
    if (!std::isfinite(a)) {
      throw NumericError("non-finite angle at operation " + std::to_string(op));
    }
    m = pair_matrix<double>(
            circuit_->operations()[static_cast<std::size_t>(op)].gate, a) *
        m;
  }
  return m;
}

void ExecutionPlan::apply_segment(std::size_t s, Amplitudes<double>& amps,
                                  const Eigen::VectorXd& params,
                                  const Eigen::MatrixXd& features,
                                  bool inverse) const {
  const Segment& seg = segments_[s];
  if (seg.permutation) {
    const auto& images =
        circuit_->operations()[static_cast<std::size_t>(seg.ops[0])].gate.qubits;
    kernels::permute_qubits(amps, inverse ? inverse_images(images) : images);
    return;
  }
  if (!seg.columnwise) {
    Mat2<double> m = segment_matrix(s, params, features, 0);
    if (inverse) m = m.adjoint().eval();
    kernels::apply_pairs(amps, seg.pairs, m);
    return;
  }
  Eigen::Matrix<std::complex<double>, 4, Eigen::Dynamic, Eigen::RowMajor>
      blocks(4, amps.cols());
  for (Index c = 0; c < amps.cols(); ++c) {
    Mat2<double> m = segment_matrix(s, params, features, c);
    if (inverse) m = m.adjoint().eval();
    blocks(0, c) = m(0, 0);
    blocks(1, c) = m(0, 1);
    blocks(2, c) = m(1, 0);
    blocks(3, c) = m(1, 1);
  }
  kernels::apply_pairs_columnwise(amps, seg.pairs, blocks);
}

Amplitudes<double> ExecutionPlan::run(const Eigen::VectorXd& params,
                                      const Eigen::MatrixXd& features) const {
  Amplitudes<double> amps =
      zero_states<double>(circuit_->n_qubits(), features.rows());
  apply(amps, params, features);
  return amps;
}

void ExecutionPlan::apply(Amplitudes<double>& amps,
                          const Eigen::VectorXd& params,
                          const Eigen::MatrixXd& features) const {
  if (static_cast<int>(params.size()) != circuit_->n_params()) {
    throw StructuralError("expected " + std::to_string(circuit_->n_params()) +
                          " parameters, got " + std::to_string(params.size()));
  }
  if (features.cols() < circuit_->n_features()) {
    throw StructuralError("expected " +
                          std::to_string(circuit_->n_features()) +
                          " input features");
  }
  if (amps.rows() != (Index{1} << circuit_->n_qubits()) ||
      amps.cols() != features.rows()) {
    throw StructuralError("state batch does not match circuit and inputs");
  }
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    apply_segment(s, amps, params, features, false);
  }
}

Eigen::MatrixXd expectations(const Circuit& circuit,
                             const Eigen::VectorXd& params,
                             const Eigen::MatrixXd& features) {
  const ExecutionPlan plan(circuit);
  const Eigen::MatrixXd diag = circuit.observable_diagonals();
  const Index n = features.rows();
  Eigen::MatrixXd out(n, diag.cols());
  for (Index start = 0; start < n; start += kSampleChunk) {
    const Index len = std::min(kSampleChunk, n - start);
    const Eigen::MatrixXd chunk = features.middleRows(start, len);
    const Amplitudes<double> amps = plan.run(params, chunk);
    out.middleRows(start, len) = amps.cwiseAbs2().transpose() * diag;
  }
  return out;
}

StateVector<double> simulate(const Circuit& circuit,
                             const Eigen::VectorXd& params,
                             const Eigen::VectorXd& features) {
  const ExecutionPlan plan(circuit);
  const Amplitudes<double> amps = plan.run(params, features.transpose());
  return StateVector<double>(circuit.n_qubits(), amps.col(0));
}

Eigen::MatrixXcd circuit_unitary(const Circuit& circuit,
                                 const Eigen::VectorXd& params,
                                 const Eigen::VectorXd& features) {
  if (circuit.n_qubits() > 6) {
    throw CapabilityError("circuit_unitary is limited to 6 qubits");
  }
  const ExecutionPlan plan(circuit);
  const Index dim = Index{1} << circuit.n_qubits();
  const Eigen::MatrixXd rows = features.transpose().replicate(dim, 1);
  Amplitudes<double> u = Amplitudes<double>::Identity(dim, dim);
  if (static_cast<int>(params.size()) != circuit.n_params()) {
    throw StructuralError("parameter count mismatch");
  }
  for (std::size_t s = 0; s < plan.segments().size(); ++s) {
    plan.apply_segment(s, u, params, rows, false);
  }
  return u;
}

}  // namespace qallab
