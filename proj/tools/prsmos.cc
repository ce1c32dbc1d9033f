// tools/prsmos.cc

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

// prsmos command-line entry point.
//
//   prsmos train    --config run.ini [--out DIR] [--seed N] [--quiet]
//   prsmos eval     --checkpoint ck.json --data dev.jsonl [--out DIR] [--quiet]
//   prsmos semisup  --config run.ini [--out DIR] [--seed N] [--quiet]
//   prsmos simulate --config run.ini [--out DIR] [--seed N] [--quiet]
//
// Exit codes: 0 success, 1 validation or runtime failure (one JSON line on
// stderr), 2 bad invocation.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "prsmos/commands.h"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string checkpoint;
  std::string data;
};

void add_run_flags(CLI::App *cmd, Flags &f) {
  cmd->add_option("--config", f.config, "INI run configuration")->required();
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  cmd->add_option("--seed", f.seed, "global seed (overrides the config)");
  cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Rank-similarity MOS prediction toolkit"};
  app.require_subcommand(1);
  Flags f;
  CLI::App *train = app.add_subcommand("train", "train a regressor");
  CLI::App *semisup = app.add_subcommand("semisup", "semi-supervised finetuning");
  CLI::App *simulate = app.add_subcommand("simulate", "synthetic experiments");
  for (CLI::App *cmd : {train, semisup, simulate}) add_run_flags(cmd, f);

  CLI::App *eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", f.checkpoint, "checkpoint JSON")->required();
  eval->add_option("--data", f.data, "labeled dataset (jsonl or csv)")->required();
  eval->add_option("--out", f.out, "output directory")->default_val("out");
  eval->add_flag("--quiet", f.quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ostream *log = f.quiet ? nullptr : &std::cout;
  try {
    if (eval->parsed()) {
      prsmos::cmd_eval(f.checkpoint, f.data, f.out, log);
      return 0;
    }
    prsmos::CliOverrides ov;
    if (!f.out.empty()) ov.out = f.out;
    ov.seed = f.seed;
    const prsmos::RunConfig cfg = prsmos::prepare_config(f.config, ov);
    if (train->parsed())
      prsmos::cmd_train(cfg, log);
    else if (semisup->parsed())
      prsmos::cmd_semisup(cfg, log);
    else
      prsmos::cmd_simulate(cfg, log);
  } catch (const std::exception &e) {
    std::cerr << prsmos::error_json(e) << '\n';
    return 1;
  }
  return 0;
}
