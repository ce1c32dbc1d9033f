// include/prsmos/train.h

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

#ifndef PRSMOS_TRAIN_H_
#define PRSMOS_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "prsmos/data.h"
#include "prsmos/metrics.h"
#include "prsmos/model.h"
#include "prsmos/rankloss.h"

namespace prsmos {

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(std::string_view s);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  LossConfig loss;
  // Epochs without a dev SRCC improvement before stopping.
  std::size_t patience = 10;
  bool shuffle = true;
  double weight_decay = 0.0;
  double dropout = 0.0;

  void validate() const;
  // Cache capacity with the 4 x batch_size default applied.
  std::size_t resolved_cache_capacity() const;
  std::unique_ptr<Optimizer> make_optimizer() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  MetricReport dev_utterance;
  MetricReport dev_system;
  bool checkpoint_taken = false;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_srcc = 0.0;
};

struct TrainResult {
  Regressor model;
  TrainLog log;
};

// Seeded minibatch training. After every epoch the model is scored on dev;
// the parameters of the epoch with the highest utterance-level dev SRCC are
// returned. Stops after cfg.patience epochs without improvement or after
// cfg.epochs. Rank-family batches are pushed to the comparison cache after
// their loss is evaluated. Throws UndefinedMetricError if dev SRCC is
// undefined.
TrainResult train(Regressor model, const Dataset &train_set, const Dataset &dev,
                  const TrainConfig &cfg);

// CSV with header
// epoch,train_loss,dev_utt_mse,dev_utt_lcc,dev_utt_srcc,dev_utt_ktau,
// dev_sys_mse,dev_sys_lcc,dev_sys_srcc,dev_sys_ktau,checkpoint
void write_train_log_csv(std::ostream &out, const TrainLog &log);

}  // namespace prsmos

#endif  // PRSMOS_TRAIN_H_
