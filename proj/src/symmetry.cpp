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

#include "qallab/symmetry.hpp"

#include <numbers>

namespace qallab {

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw StructuralError("compose: size mismatch");
  Permutation out(p.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = p[static_cast<std::size_t>(q[i])];
  }
  return out;
}

Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

Permutation d4_rotation() { return {6, 3, 0, 7, 4, 1, 8, 5, 2}; }
Permutation d4_flip() { return {2, 1, 0, 5, 4, 3, 8, 7, 6}; }

std::vector<Permutation> d4_elements() {
  std::vector<Permutation> out;
  Permutation r = identity_permutation(9);
  for (int k = 0; k < 4; ++k) {
    out.push_back(r);
    r = compose(d4_rotation(), r);
  }
  for (int k = 0; k < 4; ++k) out.push_back(compose(d4_flip(), out[static_cast<std::size_t>(k)]));
  return out;
}

Eigen::MatrixXcd GroupRep::matrix(std::size_t k) const {
  return is_permutation() ? permutation_unitary(permutations[k]) : matrices[k];
}

void GroupRep::act(std::size_t k, Amplitudes<double>& amps) const {
  if (is_permutation()) {
    kernels::permute_qubits(amps, permutations[k]);
  } else {
    amps = (matrices[k] * amps).eval();
  }
}

Eigen::VectorXd GroupRep::act_on_features(std::size_t k,
                                          const Eigen::VectorXd& x) const {
  if (feature_actions.empty()) return x;
  return feature_actions[k] * x;
}

GroupRep z2_zz() {
  GroupRep rep;
  rep.name = "Z2_ZZ";
  rep.n_qubits = 2;
  rep.matrices = {Eigen::MatrixXcd::Identity(4, 4),
                  Eigen::Vector4cd(1, -1, -1, 1).asDiagonal()};
  rep.feature_actions = {Eigen::MatrixXd::Identity(2, 2),
                         -Eigen::MatrixXd::Identity(2, 2)};
  return rep;
}

GroupRep d4_perm() {
  GroupRep rep;
  rep.name = "D4_PERM";
  rep.n_qubits = 9;
  rep.permutations = d4_elements();
  for (const auto& p : rep.permutations) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(9, 9);
    for (int i = 0; i < 9; ++i) m(p[static_cast<std::size_t>(i)], i) = 1.0;
    rep.feature_actions.push_back(m);
  }
  return rep;
}

GroupRep swap_pair(int n_qubits, int a, int b) {
  GroupRep rep;
  rep.name = "SWAP_PAIR(" + std::to_string(a) + "," + std::to_string(b) + ")";
  rep.n_qubits = n_qubits;
  if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits || a == b) {
    throw StructuralError("swap_pair needs two distinct qubits in range");
  }
  Permutation swap = identity_permutation(n_qubits);
  std::swap(swap[static_cast<std::size_t>(a)], swap[static_cast<std::size_t>(b)]);
  validate(Gate::perm(swap), n_qubits);
  rep.permutations = {identity_permutation(n_qubits), swap};
  return rep;
}

GroupRep from_matrices(std::string name, std::vector<Eigen::MatrixXcd> elements) {
  if (elements.empty()) throw StructuralError("group needs at least one element");
  const Index dim = elements[0].rows();
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim) throw StructuralError("dimension is not 2^n");
  for (const auto& e : elements) {
    if (e.rows() != dim || e.cols() != dim) {
      throw StructuralError("group elements differ in dimension");
    }
  }
  GroupRep rep;
  rep.name = std::move(name);
  rep.n_qubits = n;
  rep.matrices = std::move(elements);
  return rep;
}

Eigen::MatrixXcd twirl(const Eigen::MatrixXcd& generator, const GroupRep& rep) {
  const Index dim = Index{1} << rep.n_qubits;
  if (generator.rows() != dim || generator.cols() != dim) {
    throw StructuralError("twirl: generator dimension does not match the group");
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t k = 0; k < rep.order(); ++k) {
    const Eigen::MatrixXcd r = rep.matrix(k);
    acc += r * generator * r.adjoint();
  }
  return acc / static_cast<double>(rep.order());
}

double commutator_norm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a * b - b * a).norm();
}

namespace {

Amplitudes<double> random_states(int n_qubits, Index count, Rng& rng) {
  Amplitudes<double> s(Index{1} << n_qubits, count);
  for (Index c = 0; c < count; ++c) {
    for (Index i = 0; i < s.rows(); ++i) {
      s(i, c) = {rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
    }
    s.col(c).normalize();
  }
  return s;
}

constexpr Index kStatesPerElement = 20;

}  // namespace

EquivarianceReport check_gate_equivariance(const Gate& gate,
                                           const GroupRep& rep, int trials,
                                           Rng& rng) {
  if (trials < 1) throw StructuralError("trials must be >= 1");
  validate(gate, rep.n_qubits);
  EquivarianceReport report{std::string(to_string(gate.kind)), rep.name, trials,
                            0.0, false};
  for (int t = 0; t < trials; ++t) {
    const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    if (rep.n_qubits <= 6) {
      const Eigen::MatrixXcd u = gate_unitary(gate, theta, rep.n_qubits);
      for (std::size_t k = 0; k < rep.order(); ++k) {
        report.max_deviation =
            std::max(report.max_deviation, commutator_norm(u, rep.matrix(k)));
      }
      continue;
    }
    for (std::size_t k = 0; k < rep.order(); ++k) {
      Amplitudes<double> a = random_states(rep.n_qubits, kStatesPerElement, rng);
      Amplitudes<double> b = a;
      apply_gate_inplace(a, gate, theta);
      rep.act(k, a);
      rep.act(k, b);
      apply_gate_inplace(b, gate, theta);
      report.max_deviation = std::max(report.max_deviation, (a - b).norm());
    }
  }
  report.passed = report.max_deviation < kEquivarianceTolerance;
  return report;
}

EquivarianceReport check_circuit_equivariance(const Circuit& circuit,
                                              const GroupRep& rep, int trials,
                                              Rng& rng) {
  if (trials < 1) throw StructuralError("trials must be >= 1");
  if (circuit.n_qubits() != rep.n_qubits) {
    throw StructuralError("circuit and group act on different qubit counts");
  }
  EquivarianceReport report{"circuit", rep.name, trials, 0.0, false};
  const ExecutionPlan plan(circuit);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd params(circuit.n_params());
    for (Index i = 0; i < params.size(); ++i) {
      params(i) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    Eigen::VectorXd x(circuit.n_features());
    for (Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
    for (std::size_t k = 0; k < rep.order(); ++k) {
      const Eigen::VectorXd gx = rep.act_on_features(k, x);
      double dev = 0.0;
      if (circuit.n_qubits() <= 6) {
        const Eigen::MatrixXcd r = rep.matrix(k);
        dev = (r * circuit_unitary(circuit, params, x) -
               circuit_unitary(circuit, params, gx) * r)
                  .norm();
      } else {
        const Eigen::MatrixXd xs = x.transpose().replicate(kStatesPerElement, 1);
        const Eigen::MatrixXd gxs = gx.transpose().replicate(kStatesPerElement, 1);
        Amplitudes<double> a = random_states(circuit.n_qubits(), kStatesPerElement, rng);
        Amplitudes<double> b = a;
        plan.apply(a, params, xs);  // R U(x) psi
        rep.act(k, a);
        rep.act(k, b);              // U(g.x) R psi
        plan.apply(b, params, gxs);
        dev = (a - b).norm();
      }
      report.max_deviation = std::max(report.max_deviation, dev);
    }
  }
  report.passed = report.max_deviation < kEquivarianceTolerance;
  return report;
}

}  // namespace qallab
