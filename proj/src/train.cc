// src/train.cc

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

#include "prsmos/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "prsmos/errors.h"
#include "prsmos/report.h"
#include "prsmos/rng.h"

namespace prsmos {

std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ValidationError("train.optimizer",
                        "expected sgd or adam, got '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  loss.validate();
  if (batch_size == 0)
    throw ValidationError("train.batch_size", "must be positive");
  if (batch_size < 2 && loss.is_rank_family())
    throw ValidationError("train.batch_size",
                          "rank losses need batches of at least 2");
  if (epochs == 0) throw ValidationError("train.epochs", "must be positive");
  if (!(learning_rate > 0.0))
    throw ValidationError("train.learning_rate", "must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0))
    throw ValidationError("train.adam_beta1", "must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ValidationError("train.adam_beta2", "must be in [0, 1)");
  if (!(adam_eps > 0.0))
    throw ValidationError("train.adam_eps", "must be positive");
  if (patience == 0)
    throw ValidationError("train.patience", "must be positive");
  if (!(weight_decay >= 0.0))
    throw ValidationError("train.weight_decay", "must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ValidationError("train.dropout", "must be in [0, 1)");
}

std::size_t TrainConfig::resolved_cache_capacity() const {
  return loss.cache_capacity.value_or(4 * batch_size);
}

std::unique_ptr<Optimizer> TrainConfig::make_optimizer() const {
  if (optimizer == OptimizerKind::kSgd)
    return std::make_unique<SgdOptimizer>(learning_rate);
  return std::make_unique<AdamOptimizer>(learning_rate, adam_beta1, adam_beta2,
                                         adam_eps);
}

TrainResult train(Regressor model, const Dataset &train_set, const Dataset &dev,
                  const TrainConfig &cfg) {
  cfg.validate();
  if (train_set.empty())
    throw ValidationError("train", "training set is empty");
  if (dev.empty()) throw ValidationError("dev", "dev set is empty");
  if (train_set.dim() != model.input_dim() || dev.dim() != model.input_dim())
    throw DimensionError("model expects " + std::to_string(model.input_dim()) +
                         " features");

  const Eigen::MatrixXd x = train_set.feature_matrix();
  const std::vector<double> y = train_set.labels();
  const std::vector<double> dev_truth = dev.labels();

  ComparisonCache cache(cfg.resolved_cache_capacity());
  auto optimizer = cfg.make_optimizer();
  Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
  Rng dropout_rng = make_rng(cfg.seed, "dropout");

  TrainResult result{model, {}};
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      const bool has_partner =
          n >= 2 || (cfg.loss.uses_cache() && !cache.empty());
      if (cfg.loss.is_rank_family() && !has_partner) continue;

      Eigen::MatrixXd xb(static_cast<Eigen::Index>(n), x.cols());
      std::vector<double> yb(n);
      for (std::size_t k = 0; k < n; ++k) {
        xb.row(static_cast<Eigen::Index>(k)) =
            x.row(static_cast<Eigen::Index>(order[start + k]));
        yb[k] = y[order[start + k]];
      }

      ForwardResult fwd = forward_train(model, xb, cfg.dropout, dropout_rng);
      const LossResult loss =
          evaluate_loss(fwd.predictions, yb, cache, cfg.loss);
      Gradients grads = backward(model, fwd.trace, loss.grad);
      if (cfg.weight_decay > 0.0) {
        for (std::size_t l = 0; l < grads.size(); ++l)
          grads[l].weights += cfg.weight_decay * model.layers()[l].weights;
      }
      optimizer->step(model, grads);
      if (cfg.loss.is_rank_family()) cache.push(fwd.predictions, yb);

      loss_sum += loss.value;
      ++batches;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = batches ? loss_sum / static_cast<double>(batches) : 0.0;
    const auto reports = evaluate_levels(predict(model, dev), dev);
    rec.dev_utterance = reports.utterance;
    rec.dev_system = reports.system;
    if (!rec.dev_utterance.srcc)
      throw UndefinedMetricError("dev SRCC undefined after epoch " +
                                 std::to_string(epoch));

    if (*rec.dev_utterance.srcc > best) {
      best = *rec.dev_utterance.srcc;
      result.model = model;
      result.log.best_epoch = epoch;
      result.log.best_dev_srcc = best;
      rec.checkpoint_taken = true;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.log.epochs.push_back(rec);
    if (since_best >= cfg.patience) break;
  }
  return result;
}

void write_train_log_csv(std::ostream &out, const TrainLog &log) {
  out << "epoch,train_loss,dev_utt_mse,dev_utt_lcc,dev_utt_srcc,dev_utt_ktau,"
         "dev_sys_mse,dev_sys_lcc,dev_sys_srcc,dev_sys_ktau,checkpoint\n";
  for (const auto &r : log.epochs) {
    out << r.epoch << ',' << format_double(r.train_loss) << ','
        << format_double(r.dev_utterance.mse) << ','
        << format_optional(r.dev_utterance.lcc) << ','
        << format_optional(r.dev_utterance.srcc) << ','
        << format_optional(r.dev_utterance.ktau) << ','
        << format_double(r.dev_system.mse) << ','
        << format_optional(r.dev_system.lcc) << ','
        << format_optional(r.dev_system.srcc) << ','
        << format_optional(r.dev_system.ktau) << ','
        << (r.checkpoint_taken ? 1 : 0) << '\n';
  }
}

}  // namespace prsmos
