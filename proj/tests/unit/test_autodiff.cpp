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

#include <doctest.h>

#include <numbers>

#include "qallab/autodiff.hpp"
#include "qallab/error.hpp"
#include "qallab/models.hpp"
#include "qallab/rng.hpp"

using namespace qallab;

namespace {

constexpr double kPi = std::numbers::pi;

double mean_loss(const Model& m, const Eigen::VectorXd& params, const Eigen::MatrixXd& x,
                 const std::vector<int>& y) {
  return loss_terms(m.loss(), expectations(m.circuit(), params, x), y).loss /
         static_cast<double>(x.rows());
}

Eigen::VectorXd central_difference(const Model& m, const Eigen::VectorXd& params,
                                   const Eigen::MatrixXd& x, const std::vector<int>& y) {
  constexpr double h = 1e-5;
  Eigen::VectorXd g(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    Eigen::VectorXd up = params, down = params;
    up(i) += h;
    down(i) -= h;
    g(i) = (mean_loss(m, up, x, y) - mean_loss(m, down, x, y)) / (2 * h);
  }
  return g;
}

Eigen::MatrixXd random_inputs(const Model& m, int n, Rng& rng) {
  Eigen::MatrixXd x(n, m.n_features());
  const bool board = m.n_features() == 9;
  for (auto& v : x.reshaped()) {
    v = board ? static_cast<double>(rng.below(3)) - 1.0 : rng.uniform(-1.0, 1.0);
  }
  return x;
}

Eigen::VectorXd random_params(int n, Rng& rng) {
  Eigen::VectorXd p(n);
  for (auto& v : p) v = rng.uniform(-kPi, kPi);
  return p;
}

}  // namespace

TEST_CASE("adjoint gradients match central differences") {
  const std::vector<ModelSpec> specs = {{ModelFamily::EqnnZ, 3},
                                        {ModelFamily::Hea, 6},
                                        {ModelFamily::Ttt, 2, 1},
                                        {ModelFamily::TttBinary, 1, 2}};
  Rng rng(21);
  for (const auto& spec : specs) {
    const Model m(spec);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + static_cast<int>(rng.below(4));
      const Eigen::MatrixXd x = random_inputs(m, n, rng);
      std::vector<int> y(static_cast<std::size_t>(n));
      for (auto& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(m.n_classes())));
      const Eigen::VectorXd params = random_params(m.n_params(), rng);
      const GradientRecord rec = gradient(m.circuit(), params, x, y, m.loss());
      CHECK(rec.loss == doctest::Approx(mean_loss(m, params, x, y)).epsilon(1e-12));
      const Eigen::VectorXd fd = central_difference(m, params, x, y);
      for (Eigen::Index i = 0; i < fd.size(); ++i) {
        const double err = std::abs(rec.grad(i) - fd(i));
        const double rel = err / std::max(std::abs(fd(i)), 1e-300);
        if (err > 1e-7) worst = std::max(worst, rel);
      }
    }
    INFO(to_string(spec.family));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("RZ gradients vanish on Z eigenstates") {
  const Model m({ModelFamily::EqnnZ, 3});
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 2);
  const GradientRecord rec =
      gradient(m.circuit(), Eigen::VectorXd::Zero(9), x, std::vector<int>{1}, m.loss());
  for (int b = 0; b < 3; ++b) {
    CHECK(rec.grad(3 * b + 1) == 0.0);
    CHECK(rec.grad(3 * b + 2) == 0.0);
  }
}

TEST_CASE("a shared slot collects the gradient of every occurrence") {
  // Same gates, once with a shared slot and once with one slot per gate.
  Circuit shared(3, 1, 1), split(3, 3, 1);
  shared.add(Gate::rx(0), Binding::feature(0, 1.0));
  split.add(Gate::rx(0), Binding::feature(0, 1.0));
  const std::vector<Gate> gates = {Gate::ry(0), Gate::cry(0, 1), Gate::cry(0, 2)};
  for (int k = 0; k < 3; ++k) {
    shared.add(gates[static_cast<std::size_t>(k)], Binding::param(0));
    split.add(gates[static_cast<std::size_t>(k)], Binding::param(k));
  }
  for (auto* c : {&shared, &split}) c->add_observable(Observable::mean_z({1, 2}));

  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const std::vector<int> y = {1};
  const double theta = 0.9;
  const auto g1 = gradient(shared, Eigen::VectorXd::Constant(1, theta), x, y,
                           LossKind::BinaryCrossEntropy);
  const auto g3 = gradient(split, Eigen::VectorXd::Constant(3, theta), x, y,
                           LossKind::BinaryCrossEntropy);
  CHECK(g1.grad(0) == doctest::Approx(g3.grad.sum()).epsilon(1e-12));

  // First-order change of the loss along the shared slot.
  const auto loss_at = [&](double t) {
    return gradient(shared, Eigen::VectorXd::Constant(1, t), x, y,
                    LossKind::BinaryCrossEntropy)
        .loss;
  };
  for (double delta : {1e-3, 1e-4}) {
    const double change = loss_at(theta + delta) - loss_at(theta);
    CHECK(std::abs(change - g1.grad(0) * delta) < 10 * delta * delta);
  }
}

TEST_CASE("loss terms") {
  Eigen::MatrixXd e(2, 1);
  e << 1.0, -1.0;
  const LossTerms bce = loss_terms(LossKind::BinaryCrossEntropy, e, std::vector<int>{1, 0});
  CHECK(bce.loss == doctest::Approx(0.0).epsilon(1e-11));
  const LossTerms clipped =
      loss_terms(LossKind::BinaryCrossEntropy, e, std::vector<int>{0, 1});
  CHECK(clipped.loss == doctest::Approx(-2 * std::log(kProbClip)));
  CHECK(std::isfinite(clipped.d_expectations.sum()));

  Eigen::MatrixXd t(1, 3);
  t << 0.5, 0.0, -1.0;
  const LossTerms mse = loss_terms(LossKind::MeanSquaredError, t, std::vector<int>{0});
  CHECK(mse.loss == doctest::Approx(0.25 + 1.0 + 0.0));
  CHECK(mse.d_expectations(0, 0) == doctest::Approx(-1.0));
  CHECK(mse.d_expectations(0, 1) == doctest::Approx(2.0));

  CHECK_THROWS_AS(loss_terms(LossKind::BinaryCrossEntropy, e, std::vector<int>{2, 0}),
                  StructuralError);
  CHECK_THROWS_AS(loss_terms(LossKind::MeanSquaredError, t, std::vector<int>{3}),
                  StructuralError);
}

TEST_CASE("gradient rejects non-finite parameters") {
  const Model m({ModelFamily::EqnnZ, 1});
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  p(1) = std::nan("");
  CHECK_THROWS_AS(gradient(m.circuit(), p, Eigen::MatrixXd::Zero(1, 2), std::vector<int>{0},
                           m.loss()),
                  NumericError);
}

TEST_CASE("Adam steps") {
  AdamState s(3, 0.1);
  const Eigen::VectorXd p = Eigen::Vector3d(0.5, -0.2, 1.0);

  const auto [s0, p0] = adam_step(s, p, Eigen::VectorXd::Zero(3));
  CHECK((p0 - p).norm() == 0.0);

  const Eigen::VectorXd g = Eigen::Vector3d(2.0, -0.003, 0.0);
  const auto [s1, p1] = adam_step(s, p, g);
  // At t = 1 the bias-corrected moments are g and g^2, so the step is
  // -lr * g / (|g| + eps).
  for (int i = 0; i < 3; ++i) {
    CHECK(p1(i) - p(i) == doctest::Approx(-0.1 * g(i) / (std::abs(g(i)) + 1e-8)).epsilon(1e-12));
  }
  CHECK(s1.step == 1);

  const auto [s2, p2] = adam_step(s, p, g);
  CHECK((p2 - p1).norm() == 0.0);
  CHECK((s2.first_moment - s1.first_moment).norm() == 0.0);

  CHECK_THROWS_AS(adam_step(s, p, Eigen::VectorXd::Zero(2)), StructuralError);
}
