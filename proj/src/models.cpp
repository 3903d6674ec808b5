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

#include "qallab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qallab {

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::EqnnZ: return "eqnn_z";
    case ModelFamily::Hea: return "hea";
    case ModelFamily::Ttt: return "ttt_eqnn";
    case ModelFamily::TttBinary: return "ttt_eqnn_binary";
  }
  return "?";
}

ModelFamily parse_model_family(std::string_view name) {
  for (auto f : {ModelFamily::EqnnZ, ModelFamily::Hea, ModelFamily::Ttt,
                 ModelFamily::TttBinary}) {
    if (name == to_string(f)) return f;
  }
  throw StructuralError("unknown model family: " + std::string(name));
}

double ttt_encoding_factor(TttEncodingScale scale) {
  return scale == TttEncodingScale::TwoPiThirds ? 2.0 * std::numbers::pi / 3.0
                                                : 2.0 / 3.0;
}

int ModelSpec::param_count() const {
  switch (family) {
    case ModelFamily::EqnnZ: return 3 * depth;
    case ModelFamily::Hea: return 2 * depth;
    case ModelFamily::Ttt:
    case ModelFamily::TttBinary: return 9 * layers * depth;
  }
  return 0;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_depth(int depth, const char* what) {
  if (depth < 1) {
    throw StructuralError(std::string(what) + " must be >= 1");
  }
}

// Encoder U(x0, x1). With `cross`, qubit 0 gets RX then RY and qubit 1 gets
// RY then RX; otherwise both get RX then RY.
void add_donut_encoder(Circuit& c, bool cross) {
  c.add(Gate::rx(0), Binding::feature(0, kHalfPi));
  c.add(Gate::ry(0), Binding::feature(0, kHalfPi));
  if (cross) {
    c.add(Gate::ry(1), Binding::feature(1, kHalfPi));
    c.add(Gate::rx(1), Binding::feature(1, kHalfPi));
  } else {
    c.add(Gate::rx(1), Binding::feature(1, kHalfPi));
    c.add(Gate::ry(1), Binding::feature(1, kHalfPi));
  }
}

void add_ttt_encoder(Circuit& c, double factor) {
  for (int q = 0; q < 9; ++q) c.add(Gate::rx(q), Binding::feature(q, factor));
}

void add_ttt_observables(Circuit& c, bool binary) {
  c.add_observable(Observable::mean_z({0, 2, 6, 8}));
  if (!binary) c.add_observable(Observable::mean_z({kMiddle}));
  c.add_observable(Observable::mean_z({1, 3, 5, 7}));
}

}  // namespace

std::vector<std::pair<int, int>> corner_edge_pairs() {
  return {{0, 1}, {0, 3}, {2, 1}, {2, 5}, {6, 3}, {6, 7}, {8, 5}, {8, 7}};
}

Circuit build_eqnnz(int depth) {
  check_depth(depth, "EQNN-Z depth");
  Circuit c(2, 3 * depth, 2);
  add_donut_encoder(c, true);
  for (int b = 0; b < depth; ++b) {
    c.add(Gate::rxx(0, 1), Binding::param(3 * b));
    c.add(Gate::rz(0), Binding::param(3 * b + 1));
    c.add(Gate::rz(1), Binding::param(3 * b + 2));
  }
  c.add_observable(Observable::mean_z({0, 1}));
  return c;
}

Circuit build_hea(int depth) {
  check_depth(depth, "HEA depth");
  Circuit c(2, 2 * depth, 2);
  add_donut_encoder(c, false);
  for (int b = 0; b < depth; ++b) {
    c.add(Gate::rx(0), Binding::param(2 * b));
    c.add(Gate::rx(1), Binding::param(2 * b + 1));
    c.add(Gate::cnot(0, 1));
  }
  c.add_observable(Observable::mean_z({0, 1}));
  return c;
}

Circuit build_ttt(int layers, int depth, bool binary, TttEncodingScale scale) {
  check_depth(layers, "TTT layer count");
  check_depth(depth, "TTT depth");
  Circuit c(9, 9 * layers * depth, 9);
  const double factor = ttt_encoding_factor(scale);
  for (int l = 0; l < layers; ++l) {
    add_ttt_encoder(c, factor);
    for (int b = 0; b < depth; ++b) {
      const int base = 9 * (l * depth + b);
      const auto local = [&](int q, int slot) {
        c.add(Gate::rx(q), Binding::param(base + slot));
        c.add(Gate::ry(q), Binding::param(base + slot + 1));
      };
      for (int q : kCorners) local(q, 0);  // C
      for (int q : kEdges) local(q, 2);    // E
      local(kMiddle, 4);                   // M
      for (auto [corner, edge] : corner_edge_pairs()) {  // O
        c.add(Gate::cry(corner, edge), Binding::param(base + 6));
      }
      for (int q : kEdges) c.add(Gate::cry(q, kMiddle), Binding::param(base + 7));  // I
      for (int q : kCorners) c.add(Gate::cry(kMiddle, q), Binding::param(base + 8));  // D
    }
  }
  add_ttt_observables(c, binary);
  return c;
}

int argmax(const Eigen::Ref<const Eigen::VectorXd>& v) {
  int best = 0;
  for (Index k = 1; k < v.size(); ++k) {
    if (v(k) > v(best)) best = static_cast<int>(k);
  }
  return best;
}

Eigen::MatrixXd to_probabilities(OutputMap map,
                                 const Eigen::MatrixXd& expectations) {
  if (map == OutputMap::BinaryRescale) {
    Eigen::MatrixXd p(expectations.rows(), 2);
    p.col(1) = ((expectations.col(0).array() + 1.0) / 2.0).min(1.0).max(0.0);
    p.col(0) = 1.0 - p.col(1).array();
    return p;
  }
  Eigen::MatrixXd p(expectations.rows(), expectations.cols());
  for (Index r = 0; r < expectations.rows(); ++r) {
    const double top = expectations.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (expectations.row(r).array() - top).exp();
    p.row(r) = e / e.sum();
  }
  return p;
}

Model::Model(const ModelSpec& spec)
    : spec_(spec), circuit_(1, 0, 0), encoder_(1, 0, 0) {
  switch (spec.family) {
    case ModelFamily::EqnnZ:
    case ModelFamily::Hea: {
      const bool eqnn = spec.family == ModelFamily::EqnnZ;
      circuit_ = eqnn ? build_eqnnz(spec.depth) : build_hea(spec.depth);
      encoder_ = Circuit(2, 0, 2);
      add_donut_encoder(encoder_, eqnn);
      n_classes_ = 2;
      output_ = OutputMap::BinaryRescale;
      loss_ = LossKind::BinaryCrossEntropy;
      break;
    }
    case ModelFamily::Ttt:
    case ModelFamily::TttBinary: {
      const bool binary = spec.family == ModelFamily::TttBinary;
      circuit_ = build_ttt(spec.layers, spec.depth, binary, spec.ttt_scale);
      encoder_ = Circuit(9, 0, 9);
      add_ttt_encoder(encoder_, ttt_encoding_factor(spec.ttt_scale));
      n_classes_ = binary ? 2 : 3;
      output_ = OutputMap::Softmax;
      loss_ = LossKind::MeanSquaredError;
      break;
    }
  }
}

Eigen::MatrixXd Model::expectations(const Eigen::VectorXd& params,
                                    const Eigen::MatrixXd& features) const {
  return qallab::expectations(circuit_, params, features);
}

Eigen::MatrixXd Model::probabilities(const Eigen::VectorXd& params,
                                     const Eigen::MatrixXd& features) const {
  return to_probabilities(output_, expectations(params, features));
}

std::vector<int> Model::predict_labels(const Eigen::VectorXd& params,
                                       const Eigen::MatrixXd& features) const {
  const Eigen::MatrixXd p = probabilities(params, features);
  std::vector<int> labels(static_cast<std::size_t>(p.rows()));
  for (Index r = 0; r < p.rows(); ++r) {
    labels[static_cast<std::size_t>(r)] = argmax(p.row(r).transpose());
  }
  return labels;
}

Prediction Model::predict(const Eigen::VectorXd& params,
                          const Eigen::VectorXd& sample) const {
  const Eigen::MatrixXd row = sample.transpose();
  const Eigen::MatrixXd e = expectations(params, row);
  Prediction out;
  out.raw_expectations = e.row(0).transpose();
  out.probabilities = to_probabilities(output_, e).row(0).transpose();
  out.label = argmax(out.probabilities);
  return out;
}

double Model::accuracy(const Eigen::VectorXd& params,
                       const Eigen::MatrixXd& features,
                       std::span<const int> labels) const {
  if (features.rows() == 0) return 0.0;
  const std::vector<int> predicted = predict_labels(params, features);
  Index hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    hits += predicted[i] == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(features.rows());
}

Amplitudes<double> Model::encode(const Eigen::MatrixXd& features) const {
  return ExecutionPlan(encoder_).run(Eigen::VectorXd(), features);
}

}  // namespace qallab
