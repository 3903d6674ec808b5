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

#include "qallab/simulator.hpp"

#include <algorithm>
#include <bit>

namespace qallab {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::RXX: return "RXX";
    case GateKind::CRY: return "CRY";
    case GateKind::CNOT: return "CNOT";
    case GateKind::H: return "H";
    case GateKind::PERM: return "PERM";
  }
  return "?";
}

void validate(const Gate& gate, int n_qubits) {
  const auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
  const std::string name(to_string(gate.kind));
  if (gate.kind == GateKind::PERM) {
    if (static_cast<int>(gate.qubits.size()) != n_qubits) {
      throw StructuralError("PERM needs one image per qubit");
    }
    std::vector<bool> hit(static_cast<std::size_t>(n_qubits), false);
    for (int q : gate.qubits) {
      if (!in_range(q) || hit[static_cast<std::size_t>(q)]) {
        throw StructuralError("PERM images are not a bijection");
      }
      hit[static_cast<std::size_t>(q)] = true;
    }
    return;
  }
  const std::size_t want =
      (gate.kind == GateKind::RXX || gate.kind == GateKind::CRY ||
       gate.kind == GateKind::CNOT)
          ? 2
          : 1;
  if (gate.qubits.size() != want) {
    throw StructuralError(name + " expects " + std::to_string(want) +
                          " qubit(s)");
  }
  if (!std::all_of(gate.qubits.begin(), gate.qubits.end(), in_range)) {
    throw StructuralError(name + ": qubit index out of range");
  }
  if (want == 2 && gate.qubits[0] == gate.qubits[1]) {
    throw StructuralError(name + ": qubit indices must be distinct");
  }
  if (!std::isfinite(gate.generator_scale)) {
    throw NumericError(name + ": non-finite generator scale");
  }
}

PairSpec pair_spec(const Gate& gate) {
  const auto bit = [](int q) { return std::uint64_t{1} << q; };
  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::H:
      return {bit(gate.qubits[0]), bit(gate.qubits[0]), 0};
    case GateKind::CRY:
    case GateKind::CNOT:
      return {bit(gate.qubits[1]), bit(gate.qubits[1]), bit(gate.qubits[0])};
    case GateKind::RXX: {
      const int lo = std::min(gate.qubits[0], gate.qubits[1]);
      return {bit(gate.qubits[0]) | bit(gate.qubits[1]), bit(lo), 0};
    }
    case GateKind::PERM:
      break;
  }
  throw StructuralError("PERM has no pair structure");
}

Observable Observable::mean_z(const std::vector<int>& qubits) {
  Observable obs;
  const double w = 1.0 / static_cast<double>(qubits.size());
  for (int q : qubits) obs.terms.push_back({w, {q}});
  return obs;
}

Eigen::VectorXd Observable::diagonal(int n_qubits) const {
  const Index dim = Index{1} << n_qubits;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  for (const auto& term : terms) {
    std::uint64_t mask = 0;
    for (int q : term.support) {
      if (q < 0 || q >= n_qubits) {
        throw StructuralError("observable qubit index out of range");
      }
      mask |= std::uint64_t{1} << q;
    }
    for (Index i = 0; i < dim; ++i) {
      const bool odd = std::popcount(static_cast<std::uint64_t>(i) & mask) & 1;
      d(i) += odd ? -term.coeff : term.coeff;
    }
  }
  return d;
}

namespace {

void guard_dense(int n_qubits, int limit) {
  if (n_qubits > limit) {
    throw CapabilityError("dense matrices are limited to " +
                          std::to_string(limit) + " qubits");
  }
}

}  // namespace

Eigen::MatrixXcd gate_unitary(const Gate& gate, double angle, int n_qubits) {
  guard_dense(n_qubits, 6);
  validate(gate, n_qubits);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(Index{1} << n_qubits,
                                                  Index{1} << n_qubits);
  apply_gate_inplace(u, gate, angle);
  return u;
}

Eigen::MatrixXcd generator_matrix(const Gate& gate, int n_qubits) {
  guard_dense(n_qubits, 6);
  validate(gate, n_qubits);
  const Index dim = Index{1} << n_qubits;
  const PairSpec p = pair_spec(gate);
  const Mat2<double> g = pair_generator<double>(gate.kind);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
    const auto j = static_cast<Index>(u ^ p.flip);
    out(i, i) = g(0, 0);
    out(i, j) = g(0, 1);
    out(j, i) = g(1, 0);
    out(j, j) = g(1, 1);
  }
  return out;
}

Eigen::MatrixXcd permutation_unitary(const std::vector<int>& images) {
  const int n = static_cast<int>(images.size());
  guard_dense(n, 10);
  validate(Gate::perm(images), n);
  const Index dim = Index{1} << n;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    p(static_cast<Index>(
          kernels::permute_index(static_cast<std::uint64_t>(i), images)),
      i) = 1.0;
  }
  return p;
}

}  // namespace qallab
