// include/prsmos/commands.h

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

#ifndef PRSMOS_COMMANDS_H_
#define PRSMOS_COMMANDS_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "prsmos/run_config.h"

namespace prsmos {

// Flags that override the config file.
struct CliOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

// Loads the config, makes relative data paths absolute (relative to the
// config file's directory), applies overrides and validates.
RunConfig prepare_config(const std::filesystem::path &config_path,
                         const CliOverrides &overrides);

// Each command writes its artifacts under cfg.out_dir and throws on failure.
// Progress lines go to `log` when it is non-null.
//
// train:    checkpoint.json, train_log.csv, metrics_dev.json,
//           resolved_config.ini, metrics_test.json (when a test set exists)
// semisup:  round_<k>/{metrics_dev.json, selected.txt, pseudo_labels.jsonl,
//           train_log.csv}, summary.csv, summary.json, checkpoint.json,
//           resolved_config.ini
// simulate: dataset.jsonl, systems.csv, resolved_config.ini and, per mode,
//           distortion_report.json + train_log.csv or comparison.csv,
//           comparison.json, srcc_curves.csv
void cmd_train(const RunConfig &cfg, std::ostream *log = nullptr);
void cmd_semisup(const RunConfig &cfg, std::ostream *log = nullptr);
void cmd_simulate(const RunConfig &cfg, std::ostream *log = nullptr);

// predictions.csv (id,system_id,mos,pred) and metrics.json with both levels.
void cmd_eval(const std::filesystem::path &checkpoint,
              const std::filesystem::path &data,
              const std::filesystem::path &out_dir,
              std::ostream *log = nullptr);

// One-line JSON description of a failure: {"error", "message"} plus "field"
// or "line" when the error carries one.
std::string error_json(const std::exception &e);

}  // namespace prsmos

#endif  // PRSMOS_COMMANDS_H_
