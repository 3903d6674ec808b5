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

#include <string>
#include <vector>

#include "qallab/circuit.hpp"
#include "qallab/rng.hpp"

namespace qallab {

/// Qubit permutation as images: qubit q moves to p[q].
using Permutation = std::vector<int>;

/// (p o q): apply q first, then p.
Permutation compose(const Permutation& p, const Permutation& q);
Permutation identity_permutation(int n);

/// Quarter turn of the 3x3 board (0->6->8->2, 1->3->7->5).
Permutation d4_rotation();
/// Mirror about the vertical axis (0<->2, 3<->5, 6<->8).
Permutation d4_flip();
/// r^k for k = 0..3 followed by f o r^k for k = 0..3.
std::vector<Permutation> d4_elements();

/// A finite group acting on qubits, with an optional induced action on the
/// classical inputs (x -> feature_actions[g] * x). An empty action list means
/// inputs are left unchanged.
struct GroupRep {
  std::string name;
  int n_qubits = 1;
  std::vector<Eigen::MatrixXcd> matrices;    // explicit unitaries, or
  std::vector<Permutation> permutations;     // qubit permutations
  std::vector<Eigen::MatrixXd> feature_actions;

  std::size_t order() const {
    return permutations.empty() ? matrices.size() : permutations.size();
  }
  bool is_permutation() const { return !permutations.empty(); }
  /// Dense unitary of element k.
  Eigen::MatrixXcd matrix(std::size_t k) const;
  /// Applies element k to a batch of states.
  void act(std::size_t k, Amplitudes<double>& amps) const;
  Eigen::VectorXd act_on_features(std::size_t k,
                                  const Eigen::VectorXd& x) const;
};

/// {I, Z x Z} on two qubits; inputs map x -> -x.
GroupRep z2_zz();
/// D4 on the nine board qubits; inputs are permuted alongside.
GroupRep d4_perm();
/// {I, SWAP(a, b)} on n qubits; inputs are left unchanged.
GroupRep swap_pair(int n_qubits, int a, int b);
/// Group given by explicit unitaries (must include the identity).
GroupRep from_matrices(std::string name, std::vector<Eigen::MatrixXcd> elements);

/// (1/|S|) sum_g R(g) G R(g)^dagger.
Eigen::MatrixXcd twirl(const Eigen::MatrixXcd& generator, const GroupRep& rep);

/// Frobenius norm of AB - BA.
double commutator_norm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

inline constexpr double kEquivarianceTolerance = 1e-10;

struct EquivarianceReport {
  std::string subject;
  std::string rep;
  int trials = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

/// max over random angles and group elements of ||[U_G(theta), R(g)]||_F
/// (dense for up to 6 qubits, otherwise on random states).
EquivarianceReport check_gate_equivariance(const Gate& gate,
                                           const GroupRep& rep, int trials,
                                           Rng& rng);

/// Checks R(g) U(theta, x) = U(theta, g.x) R(g) for random parameters and
/// inputs: dense unitaries up to 6 qubits, 20 random states per element above.
EquivarianceReport check_circuit_equivariance(const Circuit& circuit,
                                              const GroupRep& rep, int trials,
                                              Rng& rng);

}  // namespace qallab
