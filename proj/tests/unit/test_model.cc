// tests/unit/test_model.cc

// Copyright 2026 The prsmos Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "oracles.h"
#include "prsmos/errors.h"
#include "prsmos/model.h"
#include "prsmos/rankloss.h"
#include "scratch.h"

using namespace prsmos;

namespace {

using V = std::vector<double>;

Eigen::MatrixXd random_batch(oracle::Gen &gen, std::size_t n, std::size_t d) {
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = gen.uniform(-2, 2);
  return x;
}

double total_loss(const Regressor &m, const Eigen::MatrixXd &x, const V &y,
                  const LossConfig &cfg) {
  return evaluate_loss(forward(m, x).predictions, y, ComparisonCache(0), cfg).value;
}

// Central differences of the loss with respect to every parameter.
V numeric_param_grad(Regressor m, const Eigen::MatrixXd &x, const V &y,
                     const LossConfig &cfg, double eps) {
  V params = m.flat_parameters();
  V out(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double orig = params[k];
    params[k] = orig + eps;
    m.set_flat_parameters(params);
    const double up = total_loss(m, x, y, cfg);
    params[k] = orig - eps;
    m.set_flat_parameters(params);
    const double down = total_loss(m, x, y, cfg);
    params[k] = orig;
    out[k] = (up - down) / (2 * eps);
  }
  return out;
}

double max_rel_err(const V &a, const V &b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) /
                                std::max({1.0, std::abs(a[i]), std::abs(b[i])}));
  return worst;
}

}  // namespace

TEST_CASE("init_regressor shapes and determinism") {
  const Regressor lin = init_regressor(Architecture::kLinear, {4, 1}, 0);
  CHECK(lin.parameter_count() == 5);
  CHECK(lin.layers()[0].bias(0) == 0.0);

  const Regressor mlp = init_regressor(Architecture::kMlp, {4, 8, 1}, 3);
  CHECK(mlp.layers().size() == 2);
  CHECK(mlp.parameter_count() == 49);
  CHECK(mlp.flat_parameters() == init_regressor(Architecture::kMlp, {4, 8, 1}, 3).flat_parameters());
  CHECK(mlp.flat_parameters() != init_regressor(Architecture::kMlp, {4, 8, 1}, 4).flat_parameters());
  for (const auto &layer : mlp.layers()) CHECK(layer.bias.isZero());

  CHECK_THROWS_AS(init_regressor(Architecture::kLinear, {4, 3, 1}, 0), ValidationError);
  CHECK_THROWS_AS(init_regressor(Architecture::kMlp, {4, 1}, 0), ValidationError);
  CHECK_THROWS_AS(init_regressor(Architecture::kMlp, {4, 8, 2}, 0), ValidationError);
}

TEST_CASE("He init scale") {
  const Regressor m = init_regressor(Architecture::kMlp, {200, 400, 1}, 9);
  const Eigen::MatrixXd &w = m.layers()[0].weights;
  const double var = w.array().square().mean();
  CHECK(var == doctest::Approx(2.0 / 200).epsilon(0.05));
}

TEST_CASE("forward examples") {
  Regressor lin(Architecture::kLinear, {2, 1});
  lin.mutable_layers()[0].weights << 1, 0;
  lin.mutable_layers()[0].bias << 0.5;
  Eigen::MatrixXd x(1, 2);
  x << 2, 9;
  CHECK(forward(lin, x).predictions == V{2.5});

  Regressor zero(Architecture::kMlp, {3, 5, 1});
  Eigen::MatrixXd xs = Eigen::MatrixXd::Random(4, 3);
  CHECK(forward(zero, xs).predictions == V{0, 0, 0, 0});

  CHECK_THROWS_AS(forward(lin, Eigen::MatrixXd::Zero(1, 3)), DimensionError);
}

TEST_CASE("batched forward equals per-sample forward") {
  oracle::Gen gen(20);
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    const Regressor m = init_regressor(Architecture::kMlp, {5, 7, 3, 1}, 1, act);
    const Eigen::MatrixXd x = random_batch(gen, 9, 5);
    const V batched = forward(m, x).predictions;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      CHECK(forward(m, x.row(i)).predictions[0] ==
            doctest::Approx(batched[i]).epsilon(1e-14));
  }
}

TEST_CASE("backward: zero upstream gradient gives zero parameter gradient") {
  oracle::Gen gen(21);
  const Regressor m = init_regressor(Architecture::kMlp, {3, 4, 1}, 2);
  const ForwardResult f = forward(m, random_batch(gen, 6, 3));
  for (double g : flatten(backward(m, f.trace, V(6, 0.0)))) CHECK(g == 0.0);
}

TEST_CASE("backward: linear model with p = 2 norm matches the closed form") {
  oracle::Gen gen(22);
  const Regressor m = init_regressor(Architecture::kLinear, {4, 1}, 5);
  const Eigen::MatrixXd x = random_batch(gen, 10, 4);
  const V y = gen.vec(10, 1, 5);
  const ForwardResult f = forward(m, x);
  const LossResult l = l1_loss(f.predictions, y, 2.0);
  const V g = flatten(backward(m, f.trace, l.grad));
  // d/dw ||Xw + b - y|| = X^T r / ||r||, d/db = sum(r) / ||r||.
  Eigen::VectorXd r(10);
  for (int i = 0; i < 10; ++i) r(i) = f.predictions[i] - y[i];
  const Eigen::VectorXd gw = x.transpose() * r / r.norm();
  for (int j = 0; j < 4; ++j) CHECK(g[j] == doctest::Approx(gw(j)).epsilon(1e-12));
  CHECK(g[4] == doctest::Approx(r.sum() / r.norm()).epsilon(1e-12));
}

TEST_CASE("backward: end-to-end finite differences for every loss family") {
  oracle::Gen gen(23);
  for (LossFamily fam : {LossFamily::kL1, LossFamily::kPrs, LossFamily::kUtmosMargin,
                         LossFamily::kCombined}) {
    for (Activation act : {Activation::kTanh, Activation::kRelu}) {
      LossConfig cfg;
      cfg.family = fam;
      cfg.lambda_c = 0.1;
      cfg.beta = 0.01;
      cfg.gamma = 0.2;
      const Regressor m = init_regressor(Architecture::kMlp, {3, 6, 1}, 7, act);
      const Eigen::MatrixXd x = random_batch(gen, 6, 3);
      const V y = gen.vec(6, 1, 5);
      const ForwardResult f = forward(m, x);
      const LossResult l =
          evaluate_loss(f.predictions, y, ComparisonCache(0), cfg);
      const V analytic = flatten(backward(m, f.trace, l.grad));
      const V numeric = numeric_param_grad(m, x, y, cfg, 1e-6);
      CHECK(max_rel_err(analytic, numeric) < 1e-4);
    }
  }
}

TEST_CASE("backward refuses a stale trace") {
  oracle::Gen gen(24);
  Regressor m = init_regressor(Architecture::kMlp, {2, 3, 1}, 1);
  const ForwardResult f = forward(m, random_batch(gen, 3, 2));
  m.mutable_layers()[0].bias(0) += 1;
  CHECK_THROWS_AS(backward(m, f.trace, V{1, 1, 1}), StaleTraceError);
}

TEST_CASE("predict: order equivariance and unlabeled records") {
  oracle::Gen gen(25);
  const Regressor m = init_regressor(Architecture::kMlp, {3, 4, 1}, 2);
  std::vector<DatasetRecord> rs;
  for (int i = 0; i < 8; ++i)
    rs.push_back({"r" + std::to_string(i), "S", gen.vec(3, -1, 1),
                  i % 2 ? std::optional<double>(3.0) : std::nullopt});
  const V p = predict(m, Dataset("d", rs));
  std::vector<DatasetRecord> rev(rs.rbegin(), rs.rend());
  const V q = predict(m, Dataset("r", rev));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == q[p.size() - 1 - i]);
  CHECK_THROWS_AS(predict(init_regressor(Architecture::kLinear, {4, 1}, 0), Dataset("d", rs)),
                  DimensionError);
}

TEST_CASE("checkpoint round trip") {
  scratch::Dir dir("model_ck");
  const Regressor m = init_regressor(Architecture::kMlp, {5, 4, 3, 1}, 11, Activation::kTanh);
  save_checkpoint(dir / "ck.json", m, 42);
  const Checkpoint back = load_checkpoint(dir / "ck.json");
  CHECK(back.seed == 42);
  CHECK(back.model.architecture() == Architecture::kMlp);
  CHECK(back.model.activation() == Activation::kTanh);
  CHECK(back.model.layer_sizes() == m.layer_sizes());
  CHECK(back.model.flat_parameters() == m.flat_parameters());
  CHECK(checkpoint_to_string(back.model, 42) == scratch::read(dir / "ck.json"));
  CHECK_THROWS_AS(checkpoint_from_string("{\"format\":\"other\"}"), Error);
}
