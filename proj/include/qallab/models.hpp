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
#include <string>
#include <string_view>
#include <vector>

#include "qallab/autodiff.hpp"
#include "qallab/circuit.hpp"

namespace qallab {

enum class ModelFamily { EqnnZ, Hea, Ttt, TttBinary };

std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

/// Angle applied to a tic-tac-toe cell value g in {-1, 0, +1}: either
/// 2*pi*g/3 (default) or the alternative 2*g/3.
enum class TttEncodingScale { TwoPiThirds, TwoThirds };

double ttt_encoding_factor(TttEncodingScale scale);

struct ModelSpec {
  ModelFamily family = ModelFamily::EqnnZ;
  int depth = 3;
  int layers = 1;  // tic-tac-toe families only
  TttEncodingScale ttt_scale = TttEncodingScale::TwoPiThirds;

  int param_count() const;
};

/// EQNN-Z: cross-ordered RX/RY encoder, then `depth` blocks of
/// RXX(t0) followed by RZ(t1) x RZ(t2). Measures (Z0 + Z1)/2.
Circuit build_eqnnz(int depth);

/// Hardware-efficient baseline: same-ordered RX/RY encoder, then `depth`
/// blocks of RX(t0) x RX(t1) followed by CNOT(0 -> 1).
Circuit build_hea(int depth);

/// 9-qubit D4-equivariant tic-tac-toe network: `layers` repetitions of an RX
/// encoder followed by `depth` CEMOID blocks. Measures the corner, middle and
/// edge means (middle dropped when `binary`).
Circuit build_ttt(int layers, int depth, bool binary,
                  TttEncodingScale scale = TttEncodingScale::TwoPiThirds);

/// Row-major 3x3 board: qubit groups.
inline constexpr int kCorners[] = {0, 2, 6, 8};
inline constexpr int kEdges[] = {1, 3, 5, 7};
inline constexpr int kMiddle = 4;

/// Grid-adjacent (corner, edge) pairs.
std::vector<std::pair<int, int>> corner_edge_pairs();

enum class OutputMap {
  /// Two classes from one expectation: P(1) = (<O> + 1) / 2.
  BinaryRescale,
  /// Softmax over the expectation vector.
  Softmax,
};

struct Prediction {
  Eigen::VectorXd raw_expectations;
  Eigen::VectorXd probabilities;
  int label = 0;
};

/// Argmax with ties resolved to the lowest index.
int argmax(const Eigen::Ref<const Eigen::VectorXd>& v);

Eigen::MatrixXd to_probabilities(OutputMap map,
                                 const Eigen::MatrixXd& expectations);

/// A circuit family bundled with its encoder, output map and training loss.
class Model {
 public:
  explicit Model(const ModelSpec& spec);

  const ModelSpec& spec() const { return spec_; }
  const Circuit& circuit() const { return circuit_; }
  /// The data-loading block alone (first encoder layer), used for fidelities.
  const Circuit& encoder() const { return encoder_; }
  int n_params() const { return circuit_.n_params(); }
  int n_features() const { return circuit_.n_features(); }
  int n_classes() const { return n_classes_; }
  OutputMap output_map() const { return output_; }
  LossKind loss() const { return loss_; }

  Eigen::MatrixXd expectations(const Eigen::VectorXd& params,
                               const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd probabilities(const Eigen::VectorXd& params,
                                const Eigen::MatrixXd& features) const;
  std::vector<int> predict_labels(const Eigen::VectorXd& params,
                                  const Eigen::MatrixXd& features) const;
  Prediction predict(const Eigen::VectorXd& params,
                     const Eigen::VectorXd& sample) const;
  double accuracy(const Eigen::VectorXd& params,
                  const Eigen::MatrixXd& features,
                  std::span<const int> labels) const;

  /// Encoded pure states, one column per sample.
  Amplitudes<double> encode(const Eigen::MatrixXd& features) const;

 private:
  ModelSpec spec_;
  Circuit circuit_;
  Circuit encoder_;
  int n_classes_;
  OutputMap output_;
  LossKind loss_;
};

}  // namespace qallab
