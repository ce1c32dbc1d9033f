// include/prsmos/run_config.h

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

#ifndef PRSMOS_RUN_CONFIG_H_
#define PRSMOS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prsmos/data.h"
#include "prsmos/semisup.h"
#include "prsmos/simulate.h"
#include "prsmos/train.h"

namespace prsmos {

enum class SimulateMode { kGenerate, kDistortion, kComparison };

// Everything a CLI run needs. Parsed from an INI-style file:
//
//   seed = 7
//   [data]     train/dev/test or dataset (+ [split]); labeled/unlabeled
//   [split]    train_fraction, dev_fraction, test_fraction, group_by_system
//   [model]    architecture, hidden, activation, start_checkpoint
//   [loss]     family, p, lambda_c, alpha, beta, gamma, cache_capacity,
//              cache_scale
//   [train]    batch_size, epochs, learning_rate, optimizer, adam_beta1,
//              adam_beta2, adam_eps, patience, shuffle, weight_decay, dropout
//   [semisup]  rounds_max, selection, regenerate
//   [bapmos]   bins, range, range_lo, range_hi
//   [sim]      SimConfig fields
//   [simulate] mode, distortion, distortion_target, families
//
// Unknown sections or keys are errors. Component seeds are derived from the
// single global seed through named substreams.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // [data]
  std::string data_train, data_dev, data_test, data_dataset;
  std::string data_labeled, data_unlabeled;

  SplitSpec split;  // seed is overwritten from the global seed
  ModelSpec model;  // seed is overwritten from the global seed
  std::string start_checkpoint;

  TrainConfig train;  // train.loss holds [loss]

  std::size_t rounds_max = 5;
  SelectionKind selection = SelectionKind::kBapmos;
  bool regenerate = true;
  BApMOSConfig bapmos;

  SimConfig sim;
  SimulateMode simulate_mode = SimulateMode::kGenerate;
  std::string distortion = "shift(100)";
  DistortionTarget distortion_target = DistortionTarget::kTruth;
  std::vector<LossFamily> families = {LossFamily::kL1, LossFamily::kPrs,
                                      LossFamily::kUtmosMargin,
                                      LossFamily::kCombined};

  // Pushes the global seed into every component seed.
  void apply_seed(std::uint64_t global_seed);
  void validate() const;
};

RunConfig parse_run_config(const std::string &text);
RunConfig load_run_config(const std::filesystem::path &path);

// Fully resolved config (all defaults spelled out). Parsing it back yields
// an identical RunConfig.
std::string to_ini(const RunConfig &cfg);

// "shift(100)", "affine(2,1)" or "monotone_cubic".
DistortionSpec parse_distortion(const std::string &text,
                                DistortionTarget target);

}  // namespace prsmos

#endif  // PRSMOS_RUN_CONFIG_H_
