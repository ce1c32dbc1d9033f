// include/prsmos/semisup.h

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

#ifndef PRSMOS_SEMISUP_H_
#define PRSMOS_SEMISUP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prsmos/data.h"
#include "prsmos/metrics.h"
#include "prsmos/model.h"
#include "prsmos/train.h"

namespace prsmos {

// Unlabeled records with the pseudo MOS values most recently assigned to them.
struct PseudoLabelPool {
  std::vector<DatasetRecord> records;
  std::vector<double> pseudo_mos;
  std::size_t generation = 0;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Pool over ds's records (labels, if any, are dropped); generation 0.
PseudoLabelPool make_pool(const Dataset &ds);

// pseudo_mos <- predict(model, records); generation + 1.
PseudoLabelPool generate_pseudo(const Regressor &model,
                                const PseudoLabelPool &pool);

// Records of the selected indices, labeled with their pseudo values.
Dataset pseudo_labeled_subset(const PseudoLabelPool &pool,
                              const std::vector<std::size_t> &indices,
                              std::string name);

// JSONL lines {"id","pseudo_mos","generation"}.
std::string pseudo_snapshot_jsonl(const PseudoLabelPool &pool);

enum class RangePolicy { kDataMinMax, kFixed };

struct BApMOSConfig {
  std::size_t bins = 10;
  RangePolicy range_policy = RangePolicy::kDataMinMax;
  double range_lo = 1.0;  // used by kFixed
  double range_hi = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Equal-width histogram of values. Values outside a fixed range are clamped
// into the edge bins; a degenerate range puts everything into bin 0.
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> bin_of;  // bin index per value
};

Histogram build_histogram(const std::vector<double> &values,
                          const BApMOSConfig &cfg);

// Balanced pseudo-label selection: with m the smallest count among non-empty
// bins, draws m indices uniformly without replacement from every non-empty
// bin. Returns sorted indices; size = (#non-empty bins) * m.
std::vector<std::size_t> bapmos_select(const PseudoLabelPool &pool,
                                       const BApMOSConfig &cfg);

enum class SelectionKind { kAll, kBapmos };

// Fresh-model recipe for few-shot runs without a starting checkpoint.
struct ModelSpec {
  Architecture architecture = Architecture::kMlp;
  std::vector<std::size_t> hidden = {32};
  Activation activation = Activation::kRelu;
  std::uint64_t seed = 0;

  Regressor build(std::size_t input_dim) const;
};

struct SemiSupConfig {
  Dataset labeled;
  Dataset unlabeled;
  Dataset dev;
  std::size_t rounds_max = 5;
  SelectionKind selection = SelectionKind::kBapmos;
  BApMOSConfig bapmos;
  TrainConfig train;
  bool regenerate_on_dev_improvement = true;
  // Pretrained model to finetune; required when labeled is empty.
  std::optional<Regressor> start_model;
  ModelSpec model_spec;

  void validate() const;
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t labeled_count = 0;
  std::size_t pseudo_count = 0;  // selected pseudo-labeled records
  std::size_t pool_size = 0;
  std::size_t generation = 0;    // pool generation used for this round
  std::vector<std::size_t> selected;
  std::string pseudo_snapshot;   // JSONL, empty for round 0
  std::optional<TrainLog> log;   // empty when no training happened
  MetricReport dev_utterance;
  MetricReport dev_system;
  bool accepted = false;
};

struct SemiSupResult {
  Regressor model;
  std::vector<RoundRecord> rounds;
  MetricReport dev_utterance;
  MetricReport dev_system;
};

// Round 0 trains on the labeled set alone (few-shot), or takes the starting
// model unchanged when there are no labels (zero-shot). Every later round
// pseudo-labels the pool with the best model so far (once only when
// regenerate_on_dev_improvement is false), selects, merges with the labeled
// records and continues training. A round is kept only when it raises dev
// SRCC; the first round that does not ends the loop.
SemiSupResult run_semisup(const SemiSupConfig &cfg);

nlohmann::ordered_json round_summary_json(const RoundRecord &r);

}  // namespace prsmos

#endif  // PRSMOS_SEMISUP_H_
