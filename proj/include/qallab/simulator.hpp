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

// Dense statevector simulation with the U(θ) = exp(-iθG) gate convention.
//
// Basis ordering: qubit q is bit q of the amplitude index (qubit 0 is the
// least significant bit). Amplitude containers have one row per basis state
// and one column per independent state, so the same kernels act on a single
// vector or on a batch of states that share the gate sequence.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "qallab/error.hpp"

namespace qallab {

using Index = Eigen::Index;

inline constexpr int kMaxQubits = 12;

enum class GateKind { RX, RY, RZ, RXX, CRY, CNOT, H, PERM };

std::string_view to_string(GateKind kind);

constexpr bool is_parameterized(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
         kind == GateKind::RXX || kind == GateKind::CRY;
}

/// A gate placement. `qubits` holds the target for one-qubit kinds,
/// (control, target) for CNOT/CRY, the qubit pair for RXX, and for PERM the
/// image of every qubit (qubit q moves to qubits[q]).
struct Gate {
  GateKind kind = GateKind::RZ;
  std::vector<int> qubits;
  double generator_scale = 1.0;

  static Gate rx(int q) { return {GateKind::RX, {q}}; }
  static Gate ry(int q) { return {GateKind::RY, {q}}; }
  static Gate rz(int q) { return {GateKind::RZ, {q}}; }
  static Gate h(int q) { return {GateKind::H, {q}}; }
  static Gate rxx(int a, int b) { return {GateKind::RXX, {a, b}}; }
  static Gate cry(int control, int target) {
    return {GateKind::CRY, {control, target}};
  }
  static Gate cnot(int control, int target) {
    return {GateKind::CNOT, {control, target}};
  }
  static Gate perm(std::vector<int> images) {
    return {GateKind::PERM, std::move(images)};
  }
};

/// Throws StructuralError unless the gate is well formed on n_qubits.
void validate(const Gate& gate, int n_qubits);

/// Every non-PERM gate acts as a 2x2 block on index pairs (i, i ^ flip) with
/// the anchor bit of i clear and all control bits of i set. Indices outside
/// any pair are left untouched.
struct PairSpec {
  std::uint64_t flip = 0;
  std::uint64_t anchor = 0;
  std::uint64_t control = 0;
};

PairSpec pair_spec(const Gate& gate);

template <typename Real>
using Mat2 = Eigen::Matrix<std::complex<Real>, 2, 2>;

/// The generator restricted to one pair block: X for RX/RXX, Y for RY/CRY,
/// Z for RZ. Every restricted generator squares to the identity.
template <typename Real>
Mat2<Real> pair_generator(GateKind kind) {
  using C = std::complex<Real>;
  Mat2<Real> g;
  switch (kind) {
    case GateKind::RX:
    case GateKind::RXX:
      g << C(0), C(1), C(1), C(0);
      break;
    case GateKind::RY:
    case GateKind::CRY:
      g << C(0), C(0, -1), C(0, 1), C(0);
      break;
    case GateKind::RZ:
      g << C(1), C(0), C(0), C(-1);
      break;
    default:
      throw StructuralError("gate kind has no generator: " +
                            std::string(to_string(kind)));
  }
  return g;
}

/// The 2x2 block realized by `gate` at `angle`.
template <typename Real>
Mat2<Real> pair_matrix(const Gate& gate, Real angle) {
  using C = std::complex<Real>;
  Mat2<Real> m;
  switch (gate.kind) {
    case GateKind::CNOT:
      m << C(0), C(1), C(1), C(0);
      return m;
    case GateKind::H: {
      const Real r = Real(1) / std::sqrt(Real(2));
      m << C(r), C(r), C(r), C(-r);
      return m;
    }
    case GateKind::PERM:
      throw StructuralError("PERM has no pair block");
    default:
      break;
  }
  const Real a = angle * static_cast<Real>(gate.generator_scale);
  // exp(-i a G) = cos(a) I - i sin(a) G because G^2 = I on the block.
  return std::cos(a) * Mat2<Real>::Identity() -
         C(0, std::sin(a)) * pair_generator<Real>(gate.kind);
}

/// A batch of states sharing the qubit count; one column per state. Row-major
/// storage keeps every basis-state row contiguous across the batch.
template <typename Real = double>
using Amplitudes = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic,
                                 Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

template <typename Derived>
using RowScratch =
    Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic>;

/// Raw sweep over contiguous rows of `cols` complex entries stored at `data`.
template <typename Real>
void apply_pairs_raw(std::complex<Real>* data, Index dim, Index cols,
                     const PairSpec& p, const Mat2<Real>& m) {
  Real* base = reinterpret_cast<Real*>(data);
  const Index width = 2 * cols;
  const bool real = m.imag().isZero(0);
  const Real ar = m(0, 0).real(), ai = m(0, 0).imag();
  const Real br = m(0, 1).real(), bi = m(0, 1).imag();
  const Real cr = m(1, 0).real(), ci = m(1, 0).imag();
  const Real dr = m(1, 1).real(), di = m(1, 1).imag();
  for (Index i = 0; i < dim; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
    Real* __restrict x = base + i * width;
    Real* __restrict y = base + static_cast<Index>(u ^ p.flip) * width;
    if (real) {
      for (Index k = 0; k < width; ++k) {
        const Real xv = x[k], yv = y[k];
        x[k] = ar * xv + br * yv;
        y[k] = cr * xv + dr * yv;
      }
    } else {
      for (Index k = 0; k < width; k += 2) {
        const Real xr = x[k], xi = x[k + 1], yr = y[k], yi = y[k + 1];
        x[k] = ar * xr - ai * xi + br * yr - bi * yi;
        x[k + 1] = ar * xi + ai * xr + br * yi + bi * yr;
        y[k] = cr * xr - ci * xi + dr * yr - di * yi;
        y[k + 1] = cr * xi + ci * xr + dr * yi + di * yr;
      }
    }
  }
}

/// amps <- (block m on every pair) * amps, column by column.
template <typename Derived, typename Real>
void apply_pairs(Eigen::MatrixBase<Derived>& amps, const PairSpec& p,
                 const Mat2<Real>& m) {
  if constexpr (std::is_same_v<Derived, Amplitudes<Real>>) {
    apply_pairs_raw(amps.derived().data(), amps.rows(), amps.cols(), p, m);
  } else {
    const Index dim = amps.rows();
    RowScratch<Derived> tmp(amps.cols());
    for (Index i = 0; i < dim; ++i) {
      const auto u = static_cast<std::uint64_t>(i);
      if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
      const auto j = static_cast<Index>(u ^ p.flip);
      tmp = amps.row(i);
      amps.row(i) = m(0, 0) * tmp + m(0, 1) * amps.row(j);
      amps.row(j) = m(1, 0) * tmp + m(1, 1) * amps.row(j);
    }
  }
}

/// Per-column blocks: row k of `m` (k = 0..3) holds entry (k/2, k%2) of the
/// block applied to column c.
template <typename Derived, typename BlockRows>
void apply_pairs_columnwise(Eigen::MatrixBase<Derived>& amps,
                            const PairSpec& p,
                            const Eigen::MatrixBase<BlockRows>& m) {
  const Index dim = amps.rows();
  RowScratch<Derived> tmp(amps.cols());
  for (Index i = 0; i < dim; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
    const auto j = static_cast<Index>(u ^ p.flip);
    tmp = amps.row(i);
    amps.row(i) = m.row(0).cwiseProduct(tmp) + m.row(1).cwiseProduct(amps.row(j));
    amps.row(j) = m.row(2).cwiseProduct(tmp) + m.row(3).cwiseProduct(amps.row(j));
  }
}

/// C(a, b) = sum over pairs and columns of conj(lam_a) * phi_b, where a, b
/// select the first (i) or second (i ^ flip) member of the pair. For any
/// block operator A, <lam|A phi> = sum_ab A(a, b) C(a, b).
template <typename DL, typename DP>
Mat2<typename DL::RealScalar> pair_correlation(
    const Eigen::MatrixBase<DL>& lam, const Eigen::MatrixBase<DP>& phi,
    const PairSpec& p) {
  using Real = typename DL::RealScalar;
  Mat2<Real> c = Mat2<Real>::Zero();
  const Index dim = lam.rows();
  if constexpr (std::is_same_v<DL, Amplitudes<Real>> &&
                std::is_same_v<DP, Amplitudes<Real>>) {
    const Index width = 2 * lam.cols();
    const Real* lb = reinterpret_cast<const Real*>(lam.derived().data());
    const Real* pb = reinterpret_cast<const Real*>(phi.derived().data());
    // Per-column accumulators, real and imaginary parts for (a, b) = ii, ij,
    // ji, jj; summing columns last keeps the inner loop vectorizable.
    const Index cols = lam.cols();
    std::vector<Real> buf(static_cast<std::size_t>(8 * cols), Real(0));
    Real* b0 = buf.data();
    for (Index i = 0; i < dim; ++i) {
      const auto u = static_cast<std::uint64_t>(i);
      if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
      const Index j = static_cast<Index>(u ^ p.flip);
      const Real* li = lb + i * width;
      const Real* lj = lb + j * width;
      const Real* pi = pb + i * width;
      const Real* pj = pb + j * width;
      for (Index k = 0; k < cols; ++k) {
        const Real lir = li[2 * k], lii = li[2 * k + 1];
        const Real ljr = lj[2 * k], lji = lj[2 * k + 1];
        const Real pir = pi[2 * k], pii = pi[2 * k + 1];
        const Real pjr = pj[2 * k], pji = pj[2 * k + 1];
        b0[k] += lir * pir + lii * pii;
        b0[cols + k] += lir * pii - lii * pir;
        b0[2 * cols + k] += lir * pjr + lii * pji;
        b0[3 * cols + k] += lir * pji - lii * pjr;
        b0[4 * cols + k] += ljr * pir + lji * pii;
        b0[5 * cols + k] += ljr * pii - lji * pir;
        b0[6 * cols + k] += ljr * pjr + lji * pji;
        b0[7 * cols + k] += ljr * pji - lji * pjr;
      }
    }
    Real acc[8] = {};
    for (int q = 0; q < 8; ++q) {
      for (Index k = 0; k < cols; ++k) acc[q] += b0[q * cols + k];
    }
    c(0, 0) = {acc[0], acc[1]};
    c(0, 1) = {acc[2], acc[3]};
    c(1, 0) = {acc[4], acc[5]};
    c(1, 1) = {acc[6], acc[7]};
    return c;
  }
  for (Index i = 0; i < dim; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    if ((u & p.anchor) != 0 || (u & p.control) != p.control) continue;
    const auto j = static_cast<Index>(u ^ p.flip);
    c(0, 0) += lam.row(i).dot(phi.row(i));
    c(0, 1) += lam.row(i).dot(phi.row(j));
    c(1, 0) += lam.row(j).dot(phi.row(i));
    c(1, 1) += lam.row(j).dot(phi.row(j));
  }
  return c;
}

/// Maps basis index i to the index with bit q of i moved to bit images[q].
inline std::uint64_t permute_index(std::uint64_t i,
                                   const std::vector<int>& images) {
  std::uint64_t out = 0;
  for (std::size_t q = 0; q < images.size(); ++q) {
    if ((i >> q) & 1U) out |= std::uint64_t{1} << images[q];
  }
  return out;
}

template <typename Derived>
void permute_qubits(Eigen::MatrixBase<Derived>& amps,
                    const std::vector<int>& images) {
  typename Derived::PlainObject src = amps;
  for (Index i = 0; i < src.rows(); ++i) {
    amps.row(static_cast<Index>(
        permute_index(static_cast<std::uint64_t>(i), images))) = src.row(i);
  }
}

}  // namespace kernels

/// In-place gate application on any amplitude container (vector or batch).
template <typename Derived>
void apply_gate_inplace(Eigen::MatrixBase<Derived>& amps, const Gate& gate,
                        typename Derived::RealScalar angle) {
  using Real = typename Derived::RealScalar;
  if (!std::isfinite(angle)) {
    throw NumericError("non-finite angle for gate " +
                       std::string(to_string(gate.kind)));
  }
  if (gate.kind == GateKind::PERM) {
    kernels::permute_qubits(amps, gate.qubits);
    return;
  }
  kernels::apply_pairs(amps, pair_spec(gate), pair_matrix<Real>(gate, angle));
}

/// Normalized pure state of 1..kMaxQubits qubits.
template <typename Real = double>
class StateVector {
 public:
  using Scalar = std::complex<Real>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// |0...0>.
  explicit StateVector(int n_qubits) : n_qubits_(checked(n_qubits)) {
    amps_ = Vector::Zero(Index{1} << n_qubits_);
    amps_(0) = Scalar(1);
  }

  StateVector(int n_qubits, Vector amplitudes)
      : n_qubits_(checked(n_qubits)), amps_(std::move(amplitudes)) {
    if (amps_.size() != (Index{1} << n_qubits_)) {
      throw StructuralError("amplitude vector length must be 2^n_qubits");
    }
  }

  static StateVector basis(int n_qubits, Index index) {
    StateVector s(n_qubits);
    if (index < 0 || index >= s.dim()) {
      throw StructuralError("basis index out of range");
    }
    s.amps_(0) = Scalar(0);
    s.amps_(index) = Scalar(1);
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }
  Real norm() const { return amps_.norm(); }

 private:
  static int checked(int n) {
    if (n < 1) throw StructuralError("qubit count must be >= 1");
    if (n > kMaxQubits) {
      throw CapabilityError("at most " + std::to_string(kMaxQubits) +
                            " qubits are supported");
    }
    return n;
  }

  int n_qubits_;
  Vector amps_;
};

template <typename Real>
Amplitudes<Real> zero_states(int n_qubits, Index batch) {
  Amplitudes<Real> a = Amplitudes<Real>::Zero(Index{1} << n_qubits, batch);
  a.row(0).setOnes();
  return a;
}

template <typename Real>
StateVector<Real> apply_gate(StateVector<Real> state, const Gate& gate,
                             Real angle) {
  validate(gate, state.n_qubits());
  apply_gate_inplace(state.amplitudes(), gate, angle);
  return state;
}

/// Reindexes amplitudes so that qubit q becomes qubit images[q].
template <typename Real>
StateVector<Real> apply_permutation(StateVector<Real> state,
                                    const std::vector<int>& images) {
  validate(Gate::perm(images), state.n_qubits());
  kernels::permute_qubits(state.amplitudes(), images);
  return state;
}

/// One weighted Z-string term: coeff * prod_{q in support} Z_q.
struct ZTerm {
  double coeff = 1.0;
  std::vector<int> support;
};

/// Sum of Z-string terms; diagonal in the computational basis.
struct Observable {
  std::vector<ZTerm> terms;

  /// (1/|qubits|) * sum_q Z_q.
  static Observable mean_z(const std::vector<int>& qubits);

  /// Diagonal entries over the 2^n basis.
  Eigen::VectorXd diagonal(int n_qubits) const;
};

template <typename Real>
Real expectation(const StateVector<Real>& state, const Observable& obs) {
  const Eigen::VectorXd d = obs.diagonal(state.n_qubits());
  return static_cast<Real>(
      state.amplitudes().cwiseAbs2().template cast<double>().dot(d));
}

/// Dense 2^n x 2^n unitary of a single gate. Guarded to n <= 6.
Eigen::MatrixXcd gate_unitary(const Gate& gate, double angle, int n_qubits);

/// Dense Hermitian generator G with U = exp(-i angle scale G).
Eigen::MatrixXcd generator_matrix(const Gate& gate, int n_qubits);

/// Dense permutation unitary for a qubit relabeling. Guarded to n <= 10.
Eigen::MatrixXcd permutation_unitary(const std::vector<int>& images);

}  // namespace qallab
