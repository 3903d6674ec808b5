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
#include <vector>

#include "qallab/simulator.hpp"

namespace qallab {

/// Where a gate's angle comes from. The realized angle is scale * value,
/// with value the fixed angle, a trainable parameter, or an input feature.
struct Binding {
  enum class Source { Fixed, Param, Feature };

  Source source = Source::Fixed;
  int index = -1;
  double scale = 1.0;
  double value = 0.0;

  static Binding fixed(double angle) { return {Source::Fixed, -1, 1.0, angle}; }
  static Binding param(int slot, double scale = 1.0) {
    return {Source::Param, slot, scale, 0.0};
  }
  static Binding feature(int index, double scale) {
    return {Source::Feature, index, scale, 0.0};
  }
};

struct Operation {
  Gate gate;
  Binding binding;
};

/// Ordered gate list with parameter/feature bindings and measured observables.
/// Parameter slots may be shared between any number of gates.
class Circuit {
 public:
  Circuit(int n_qubits, int n_params, int n_features);

  Circuit& add(Gate gate, Binding binding = {});
  Circuit& add_observable(Observable obs);
  /// Appends every operation of `other` (same shape required).
  Circuit& append(const Circuit& other);

  int n_qubits() const { return n_qubits_; }
  int n_params() const { return n_params_; }
  int n_features() const { return n_features_; }
  const std::vector<Operation>& operations() const { return ops_; }
  const std::vector<Observable>& observables() const { return observables_; }

  /// Diagonals of every observable, one column each.
  Eigen::MatrixXd observable_diagonals() const;

 private:
  int n_qubits_;
  int n_params_;
  int n_features_;
  std::vector<Operation> ops_;
  std::vector<Observable> observables_;
};

/// Circuit lowered to fused segments: runs of one-qubit uncontrolled gates on
/// the same qubit collapse into a single 2x2 block per segment.
class ExecutionPlan {
 public:
  struct Segment {
    PairSpec pairs;
    bool permutation = false;
    bool columnwise = false;  // depends on input features
    std::vector<int> ops;     // indices into Circuit::operations(), in order
  };

  explicit ExecutionPlan(const Circuit& circuit);

  const Circuit& circuit() const { return *circuit_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Runs the circuit on |0...0> for every row of `features`; column c of
  /// the result is the output state for features.row(c).
  Amplitudes<double> run(const Eigen::VectorXd& params,
                         const Eigen::MatrixXd& features) const;

  /// Runs the circuit on arbitrary input states (one column per row of
  /// `features`).
  void apply(Amplitudes<double>& amps, const Eigen::VectorXd& params,
             const Eigen::MatrixXd& features) const;

  /// Applies segment s (or its inverse) to a batch of states.
  void apply_segment(std::size_t s, Amplitudes<double>& amps,
                     const Eigen::VectorXd& params,
                     const Eigen::MatrixXd& features, bool inverse) const;

  /// Realized angle of operation `op` for one feature row.
  double angle(int op, const Eigen::VectorXd& params,
               const Eigen::MatrixXd& features, Index row) const;

  /// Block of segment s; the shared version requires !columnwise.
  Mat2<double> segment_matrix(std::size_t s, const Eigen::VectorXd& params,
                              const Eigen::MatrixXd& features, Index row) const;

 private:
  const Circuit* circuit_;
  std::vector<Segment> segments_;
};

/// B x n_observables matrix of exact expectations.
Eigen::MatrixXd expectations(const Circuit& circuit,
                             const Eigen::VectorXd& params,
                             const Eigen::MatrixXd& features);

StateVector<double> simulate(const Circuit& circuit,
                             const Eigen::VectorXd& params,
                             const Eigen::VectorXd& features);

/// Dense unitary of the circuit for one input; n_qubits <= 6.
Eigen::MatrixXcd circuit_unitary(const Circuit& circuit,
                                 const Eigen::VectorXd& params,
                                 const Eigen::VectorXd& features);

/// Batch size used when streaming many samples through a circuit.
inline constexpr Index kSampleChunk = 32;

}  // namespace qallab
