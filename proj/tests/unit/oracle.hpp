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

// Reference implementations used only by the tests. They build dense
// operators from Kronecker products and matrix functions, sharing no code
// with the bit-indexed kernels under test.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "qallab/circuit.hpp"
#include "qallab/rng.hpp"

namespace oracle {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline MatrixXcd pauli(char p) {
  MatrixXcd m(2, 2);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = MatrixXcd::Identity(2, 2);
  }
  return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Tensor product with factors[q] on qubit q; qubit 0 is the least
/// significant index bit, so it is the rightmost Kronecker factor.
inline MatrixXcd on_qubits(const std::vector<MatrixXcd>& factors) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) out = kron(out, *it);
  return out;
}

inline MatrixXcd single(int n, int q, const MatrixXcd& m) {
  std::vector<MatrixXcd> f(static_cast<std::size_t>(n), MatrixXcd::Identity(2, 2));
  f[static_cast<std::size_t>(q)] = m;
  return on_qubits(f);
}

inline MatrixXcd pair(int n, int a, const MatrixXcd& ma, int b, const MatrixXcd& mb) {
  std::vector<MatrixXcd> f(static_cast<std::size_t>(n), MatrixXcd::Identity(2, 2));
  f[static_cast<std::size_t>(a)] = ma;
  f[static_cast<std::size_t>(b)] = mb;
  return on_qubits(f);
}

inline MatrixXcd proj(int bit) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  m(bit, bit) = 1;
  return m;
}

/// exp(-i theta G) for Hermitian G, by diagonalization.
inline MatrixXcd expm_minus_i(const MatrixXcd& g, double theta) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
  VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(cd(0, -theta * es.eigenvalues()(k)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Hermitian generator of a parameterized gate, from its textbook definition.
inline MatrixXcd generator(const qallab::Gate& g, int n) {
  using qallab::GateKind;
  const auto& q = g.qubits;
  switch (g.kind) {
    case GateKind::RX: return single(n, q[0], pauli('X'));
    case GateKind::RY: return single(n, q[0], pauli('Y'));
    case GateKind::RZ: return single(n, q[0], pauli('Z'));
    case GateKind::RXX: return pair(n, q[0], pauli('X'), q[1], pauli('X'));
    case GateKind::CRY: return pair(n, q[0], proj(1), q[1], pauli('Y'));
    default: return MatrixXcd();
  }
}

/// Dense unitary of any gate at `angle`.
inline MatrixXcd gate(const qallab::Gate& g, double angle, int n) {
  using qallab::GateKind;
  const auto& q = g.qubits;
  if (g.kind == GateKind::CNOT) {
    return pair(n, q[0], proj(0), q[1], MatrixXcd::Identity(2, 2)) +
           pair(n, q[0], proj(1), q[1], pauli('X'));
  }
  if (g.kind == GateKind::H) {
    MatrixXcd h(2, 2);
    h << 1, 1, 1, -1;
    return single(n, q[0], h / std::sqrt(2.0));
  }
  if (g.kind == GateKind::PERM) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    MatrixXcd p = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::Index j = 0;
      for (int b = 0; b < n; ++b) {
        if ((i >> b) & 1) j |= Eigen::Index{1} << q[static_cast<std::size_t>(b)];
      }
      p(j, i) = 1;
    }
    return p;
  }
  return expm_minus_i(generator(g, n), angle * g.generator_scale);
}

inline double binding_angle(const qallab::Binding& b, const Eigen::VectorXd& params,
                            const Eigen::VectorXd& x) {
  using S = qallab::Binding::Source;
  switch (b.source) {
    case S::Fixed: return b.value;
    case S::Param: return b.scale * params(b.index);
    case S::Feature: return b.scale * x(b.index);
  }
  return 0.0;
}

/// Final state of a circuit on |0...0>, one dense gate at a time.
inline VectorXcd run(const qallab::Circuit& c, const Eigen::VectorXd& params,
                     const Eigen::VectorXd& x) {
  const int n = c.n_qubits();
  VectorXcd psi = VectorXcd::Zero(Eigen::Index{1} << n);
  psi(0) = 1;
  for (const auto& op : c.operations()) {
    psi = gate(op.gate, binding_angle(op.binding, params, x), n) * psi;
  }
  return psi;
}

/// Expectations of every circuit observable, as dense Z-string products.
inline Eigen::VectorXd expectations(const qallab::Circuit& c, const VectorXcd& psi) {
  const int n = c.n_qubits();
  Eigen::VectorXd out(static_cast<Eigen::Index>(c.observables().size()));
  for (std::size_t k = 0; k < c.observables().size(); ++k) {
    MatrixXcd o = MatrixXcd::Zero(psi.size(), psi.size());
    for (const auto& t : c.observables()[k].terms) {
      std::vector<MatrixXcd> f(static_cast<std::size_t>(n), MatrixXcd::Identity(2, 2));
      for (int q : t.support) f[static_cast<std::size_t>(q)] = pauli('Z');
      o += t.coeff * on_qubits(f);
    }
    out(static_cast<Eigen::Index>(k)) = psi.dot(o * psi).real();
  }
  return out;
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues at
/// rounding level are treated as zero so rank-deficient inputs stay accurate.
inline MatrixXcd sqrtm_psd(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
  const double floor = 1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd ev = es.eigenvalues().unaryExpr([floor](double v) {
    return v > floor ? std::sqrt(v) : 0.0;
  });
  return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.
inline double density_fidelity(const MatrixXcd& rho, const MatrixXcd& sigma) {
  const MatrixXcd s = sqrtm_psd(rho);
  return std::norm(sqrtm_psd(s * sigma * s).trace());
}

inline VectorXcd random_state(int n, qallab::Rng& rng) {
  VectorXcd v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(rng.gaussian(0, 1), rng.gaussian(0, 1));
  return v / v.norm();
}

/// Frobenius distance after removing the best global phase.
inline double phase_distance(const MatrixXcd& a, const MatrixXcd& b) {
  const cd overlap = (b.adjoint() * a).trace();
  const cd phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cd(1);
  return (a - phase * b).norm();
}

}  // namespace oracle
