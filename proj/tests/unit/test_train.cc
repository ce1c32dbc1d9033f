// tests/unit/test_train.cc

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

#include <algorithm>
#include <sstream>

#include "oracles.h"
#include "prsmos/errors.h"
#include "prsmos/metrics.h"
#include "prsmos/simulate.h"
#include "prsmos/train.h"

using namespace prsmos;

namespace {

// mos = w* . x exactly.
Dataset realizable(std::size_t n, std::uint64_t seed, const std::string &prefix) {
  oracle::Gen gen(seed);
  const std::vector<double> w{0.5, -1.0, 2.0};
  std::vector<DatasetRecord> rs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = gen.vec(3, -1, 1);
    const double y = w[0] * x[0] + w[1] * x[1] + w[2] * x[2];
    rs.push_back({prefix + std::to_string(i), "s" + std::to_string(i % 5), x, y});
  }
  return Dataset(prefix, rs);
}

std::string log_text(const TrainLog &log) {
  std::ostringstream out;
  write_train_log_csv(out, log);
  return out.str();
}

DatasetSplit sim_split(std::uint64_t seed) {
  SimConfig sim;
  sim.n_systems = 12;
  sim.samples_per_system = 15;
  sim.feature_dim = 8;
  sim.seed = seed;
  SplitSpec spec;
  spec.seed = seed;
  return split(simulate_dataset(sim), spec);
}

}  // namespace

TEST_CASE("linear model fits a realizable task with the L1 loss") {
  const Dataset tr = realizable(64, 1, "t"), dev = realizable(32, 2, "d");
  TrainConfig cfg;
  cfg.loss.family = LossFamily::kL1;
  cfg.batch_size = 64;
  cfg.epochs = 200;
  cfg.patience = 200;
  cfg.learning_rate = 0.05;
  cfg.seed = 3;
  const TrainResult r =
      train(init_regressor(Architecture::kLinear, {3, 1}, 4), tr, dev, cfg);
  REQUIRE(r.log.epochs.size() == 200);
  // The L1 loss sums |residual| over the batch; compare the per-sample mean.
  double best = 1e9;
  for (const auto &e : r.log.epochs) best = std::min(best, e.train_loss);
  CHECK(best / 64 < 5e-3);
  CHECK(best < r.log.epochs.front().train_loss / 100);
}

TEST_CASE("patience 1 with a flat dev SRCC stops after the second epoch") {
  const DatasetSplit s = sim_split(5);
  TrainConfig cfg;
  cfg.loss.family = LossFamily::kPrs;
  cfg.learning_rate = 1e-15;
  cfg.patience = 1;
  cfg.epochs = 10;
  const Regressor init = init_regressor(Architecture::kMlp, {8, 8, 1}, 1);
  const TrainResult r = train(init, s.train, s.dev, cfg);
  CHECK(r.log.epochs.size() == 2);
  CHECK(r.log.best_epoch == 1);
  CHECK(r.log.epochs[0].checkpoint_taken);
  CHECK_FALSE(r.log.epochs[1].checkpoint_taken);
}

TEST_CASE("training is deterministic and returns the best-dev-SRCC parameters") {
  const DatasetSplit s = sim_split(6);
  for (LossFamily f : {LossFamily::kL1, LossFamily::kPrs, LossFamily::kEprs,
                       LossFamily::kCombined, LossFamily::kUtmosMargin}) {
    TrainConfig cfg;
    cfg.loss.family = f;
    cfg.loss.lambda_c = 0.1;
    cfg.loss.beta = 0.01;
    cfg.loss.gamma = 0.2;
    cfg.batch_size = 16;
    cfg.epochs = 15;
    cfg.learning_rate = 0.01;
    cfg.seed = 9;
    const Regressor init = init_regressor(Architecture::kMlp, {8, 8, 1}, 2);
    const TrainResult a = train(init, s.train, s.dev, cfg);
    const TrainResult b = train(init, s.train, s.dev, cfg);
    CHECK(log_text(a.log) == log_text(b.log));
    CHECK(a.model.flat_parameters() == b.model.flat_parameters());

    double best = -2;
    for (const auto &e : a.log.epochs) best = std::max(best, *e.dev_utterance.srcc);
    CHECK(best == a.log.best_dev_srcc);
    CHECK(srcc(predict(a.model, s.dev), s.dev.labels()) == best);
    std::size_t taken = 0;
    for (const auto &e : a.log.epochs) taken += e.checkpoint_taken;
    CHECK(taken >= 1);
    CHECK(a.log.epochs[a.log.best_epoch - 1].checkpoint_taken);
  }
}

TEST_CASE("shifting a trained model's outputs changes MSE but not the rank metrics") {
  const DatasetSplit s = sim_split(7);
  TrainConfig cfg;
  cfg.loss.family = LossFamily::kPrs;
  cfg.epochs = 10;
  cfg.learning_rate = 0.01;
  TrainResult r = train(init_regressor(Architecture::kMlp, {8, 8, 1}, 3), s.train, s.dev, cfg);
  const std::vector<double> before = predict(r.model, s.dev);
  r.model.mutable_layers().back().bias(0) += 5.0;
  const std::vector<double> after = predict(r.model, s.dev);
  const auto y = s.dev.labels();
  CHECK(mse(after, y) != doctest::Approx(mse(before, y)));
  CHECK(srcc(after, y) == srcc(before, y));
  CHECK(ktau(after, y) == ktau(before, y));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.loss.family = LossFamily::kPrs;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.loss.family = LossFamily::kL1;
  CHECK_NOTHROW(cfg.validate());
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  TrainConfig c2;
  CHECK(c2.resolved_cache_capacity() == 4 * c2.batch_size);
  CHECK(optimizer_from_string(to_string(OptimizerKind::kSgd)) == OptimizerKind::kSgd);
}

TEST_CASE("an odd-sized train set with rank losses trains without error") {
  const Dataset tr = realizable(9, 3, "t"), dev = realizable(8, 4, "d");
  TrainConfig cfg;
  cfg.loss.family = LossFamily::kPrs;
  cfg.batch_size = 2;
  cfg.epochs = 3;
  CHECK_NOTHROW(train(init_regressor(Architecture::kLinear, {3, 1}, 4), tr, dev, cfg));
  cfg.loss.family = LossFamily::kEprs;
  CHECK_NOTHROW(train(init_regressor(Architecture::kLinear, {3, 1}, 4), tr, dev, cfg));
}

TEST_CASE("sgd, weight decay and dropout runs are deterministic too") {
  const DatasetSplit s = sim_split(8);
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.learning_rate = 1e-3;
  cfg.weight_decay = 1e-3;
  cfg.dropout = 0.2;
  cfg.epochs = 5;
  const Regressor init = init_regressor(Architecture::kMlp, {8, 8, 1}, 2);
  CHECK(log_text(train(init, s.train, s.dev, cfg).log) ==
        log_text(train(init, s.train, s.dev, cfg).log));
}

TEST_CASE("undefined dev SRCC aborts training") {
  const Dataset tr = realizable(10, 3, "t");
  std::vector<DatasetRecord> rs = realizable(4, 5, "d").records();
  for (auto &r : rs) r.mos = 3.0;
  TrainConfig cfg;
  cfg.epochs = 2;
  CHECK_THROWS_AS(train(init_regressor(Architecture::kLinear, {3, 1}, 4), tr,
                        Dataset("flat", rs), cfg),
                  UndefinedMetricError);
}
