// src/commands.cc

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

#include "prsmos/commands.h"

#include <sstream>

#include <json.hpp>

#include "prsmos/errors.h"
#include "prsmos/metrics.h"
#include "prsmos/model.h"
#include "prsmos/report.h"
#include "prsmos/semisup.h"
#include "prsmos/simulate.h"
#include "prsmos/train.h"

namespace prsmos {

namespace fs = std::filesystem;

namespace {

void resolve(std::string &p, const fs::path &base) {
  if (p.empty()) return;
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  p = path.lexically_normal().string();
}

nlohmann::ordered_json levels_json(const LevelReports &r) {
  nlohmann::ordered_json j;
  j["utterance"] = to_json(r.utterance);
  j["system"] = to_json(r.system);
  return j;
}

std::string log_csv(const TrainLog &log) {
  std::ostringstream out;
  write_train_log_csv(out, log);
  return out.str();
}

Dataset load_optional(const std::string &path, const std::string &name) {
  if (path.empty()) return Dataset(name);
  return load_dataset(path);
}

void note(std::ostream *log, const std::string &line) {
  if (log) *log << line << '\n';
}

struct TrainData {
  Dataset train, dev;
  std::optional<Dataset> test;
};

TrainData train_data(const RunConfig &cfg) {
  if (!cfg.data_train.empty()) {
    if (cfg.data_dev.empty())
      throw ValidationError("data.dev", "a dev set is required with data.train");
    TrainData d{load_dataset(cfg.data_train), load_dataset(cfg.data_dev), {}};
    if (!cfg.data_test.empty()) d.test = load_dataset(cfg.data_test);
    return d;
  }
  if (cfg.data_dataset.empty())
    throw ValidationError("data.train", "set data.train/data.dev or data.dataset");
  DatasetSplit parts = split(load_dataset(cfg.data_dataset), cfg.split);
  TrainData d{std::move(parts.train), std::move(parts.dev), {}};
  if (!parts.test.empty()) d.test = std::move(parts.test);
  return d;
}

void write_common(const RunConfig &cfg) {
  write_text_file(fs::path(cfg.out_dir) / "resolved_config.ini", to_ini(cfg));
}

}  // namespace

RunConfig prepare_config(const fs::path &config_path,
                         const CliOverrides &overrides) {
  RunConfig cfg = load_run_config(config_path);
  const fs::path base = fs::absolute(config_path).parent_path();
  for (std::string *p : {&cfg.data_train, &cfg.data_dev, &cfg.data_test,
                         &cfg.data_dataset, &cfg.data_labeled,
                         &cfg.data_unlabeled, &cfg.start_checkpoint})
    resolve(*p, base);
  if (overrides.seed) cfg.apply_seed(*overrides.seed);
  if (overrides.out) cfg.out_dir = overrides.out->string();
  cfg.validate();
  return cfg;
}

void cmd_train(const RunConfig &cfg, std::ostream *log) {
  cfg.validate();
  const TrainData data = train_data(cfg);
  if (!data.train.fully_labeled() || !data.dev.fully_labeled())
    throw ValidationError("data", "train and dev must be fully labeled");

  Regressor init = cfg.start_checkpoint.empty()
                       ? cfg.model.build(data.train.dim())
                       : load_checkpoint(cfg.start_checkpoint).model;
  TrainResult tr = train(std::move(init), data.train, data.dev, cfg.train);

  const fs::path out(cfg.out_dir);
  save_checkpoint(out / "checkpoint.json", tr.model, cfg.seed);
  write_text_file(out / "train_log.csv", log_csv(tr.log));
  const LevelReports dev = evaluate_levels(predict(tr.model, data.dev), data.dev);
  write_json_file(out / "metrics_dev.json", levels_json(dev));
  if (data.test) {
    if (!data.test->fully_labeled())
      throw ValidationError("data.test", "test set must be fully labeled");
    write_json_file(out / "metrics_test.json",
                    levels_json(evaluate_levels(predict(tr.model, *data.test),
                                                *data.test)));
  }
  write_common(cfg);
  note(log, "train: " + std::to_string(tr.log.epochs.size()) +
                " epochs, best epoch " + std::to_string(tr.log.best_epoch) +
                ", dev srcc " + format_double(tr.log.best_dev_srcc));
}

void cmd_eval(const fs::path &checkpoint, const fs::path &data,
              const fs::path &out_dir, std::ostream *log) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const Dataset ds = load_dataset(data);
  if (!ds.fully_labeled())
    throw ValidationError("data", "evaluation data must be fully labeled");
  const std::vector<double> pred = predict(ck.model, ds);

  std::ostringstream csv;
  csv << "id,system_id,mos,pred\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    csv << ds[i].id << ',' << ds[i].system_id << ',' << format_double(*ds[i].mos)
        << ',' << format_double(pred[i]) << '\n';
  write_text_file(out_dir / "predictions.csv", csv.str());
  const LevelReports reports = evaluate_levels(pred, ds);
  write_json_file(out_dir / "metrics.json", levels_json(reports));
  note(log, "eval: " + std::to_string(ds.size()) + " records, srcc " +
                format_optional(reports.utterance.srcc));
}

void cmd_semisup(const RunConfig &cfg, std::ostream *log) {
  cfg.validate();
  if (cfg.data_dev.empty())
    throw ValidationError("data.dev", "semisup needs a labeled dev set");
  SemiSupConfig sc;
  sc.labeled = load_optional(cfg.data_labeled, "labeled");
  sc.unlabeled = load_optional(cfg.data_unlabeled, "unlabeled");
  sc.dev = load_dataset(cfg.data_dev);
  sc.rounds_max = cfg.rounds_max;
  sc.selection = cfg.selection;
  sc.bapmos = cfg.bapmos;
  sc.train = cfg.train;
  sc.regenerate_on_dev_improvement = cfg.regenerate;
  sc.model_spec = cfg.model;
  if (!cfg.start_checkpoint.empty())
    sc.start_model = load_checkpoint(cfg.start_checkpoint).model;

  const SemiSupResult res = run_semisup(sc);

  const fs::path out(cfg.out_dir);
  std::ostringstream csv;
  csv << "round,labeled,unlabeled,selected,generation,accepted,"
         "utt_mse,utt_lcc,utt_srcc,utt_ktau,sys_mse,sys_lcc,sys_srcc,sys_ktau\n";
  nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
  for (const RoundRecord &r : res.rounds) {
    const fs::path dir = out / ("round_" + std::to_string(r.round));
    nlohmann::ordered_json m;
    m["utterance"] = to_json(r.dev_utterance);
    m["system"] = to_json(r.dev_system);
    write_json_file(dir / "metrics_dev.json", m);
    if (r.log) write_text_file(dir / "train_log.csv", log_csv(*r.log));
    if (r.round > 0) {
      std::ostringstream sel;
      for (std::size_t i : r.selected) sel << sc.unlabeled[i].id << '\n';
      write_text_file(dir / "selected.txt", sel.str());
      write_text_file(dir / "pseudo_labels.jsonl", r.pseudo_snapshot);
    }
    csv << r.round << ',' << r.labeled_count << ',' << r.pool_size << ','
        << r.pseudo_count << ',' << r.generation << ','
        << (r.accepted ? "true" : "false");
    for (const MetricReport *m2 : {&r.dev_utterance, &r.dev_system})
      csv << ',' << format_double(m2->mse) << ',' << format_optional(m2->lcc)
          << ',' << format_optional(m2->srcc) << ','
          << format_optional(m2->ktau);
    csv << '\n';
    rounds.push_back(round_summary_json(r));
  }
  write_text_file(out / "summary.csv", csv.str());

  nlohmann::ordered_json summary;
  summary["labeled"] = sc.labeled.size();
  summary["unlabeled"] = sc.unlabeled.size();
  summary["rounds"] = rounds;
  summary["final"]["utterance"] = to_json(res.dev_utterance);
  summary["final"]["system"] = to_json(res.dev_system);
  write_json_file(out / "summary.json", summary);
  save_checkpoint(out / "checkpoint.json", res.model, cfg.seed);
  write_common(cfg);
  note(log, "semisup: " + std::to_string(res.rounds.size()) +
                " rounds, final dev srcc " +
                format_optional(res.dev_utterance.srcc));
}

void cmd_simulate(const RunConfig &cfg, std::ostream *log) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  const Dataset ds = simulate_dataset(cfg.sim);
  save_dataset(ds, out / "dataset.jsonl", DataFormat::kJsonl);
  std::ostringstream systems;
  systems << "system_id,quality\n";
  for (const auto &[id, q] : simulated_system_qualities(cfg.sim))
    systems << id << ',' << format_double(q) << '\n';
  write_text_file(out / "systems.csv", systems.str());

  switch (cfg.simulate_mode) {
    case SimulateMode::kGenerate:
      note(log, "simulate: " + std::to_string(ds.size()) + " records");
      break;
    case SimulateMode::kDistortion: {
      const DatasetSplit parts = split(ds, cfg.split);
      TrainResult tr =
          train(cfg.model.build(ds.dim()), parts.train, parts.dev, cfg.train);
      write_text_file(out / "train_log.csv", log_csv(tr.log));
      const DistortionReport rep = run_distortion_experiment(
          tr.model, parts.test,
          parse_distortion(cfg.distortion, cfg.distortion_target));
      write_json_file(out / "distortion_report.json", to_json(rep));
      note(log, "simulate: distortion " + rep.distortion + " on " +
                    std::to_string(parts.test.size()) + " test records");
      break;
    }
    case SimulateMode::kComparison: {
      std::vector<LossArm> arms;
      for (LossFamily f : cfg.families) {
        LossConfig loss = cfg.train.loss;
        loss.family = f;
        arms.push_back({std::string(to_string(f)), loss});
      }
      const ComparisonTable table = run_loss_comparison(
          cfg.sim, arms, cfg.train, cfg.model, cfg.split);
      write_text_file(out / "comparison.csv", comparison_csv(table));
      write_json_file(out / "comparison.json", comparison_json(table));
      write_text_file(out / "srcc_curves.csv", srcc_curves_csv(table));
      note(log, "simulate: compared " + std::to_string(arms.size()) +
                    " loss families");
      break;
    }
  }
  write_common(cfg);
}

std::string error_json(const std::exception &e) {
  nlohmann::ordered_json j;
  if (const auto *pe = dynamic_cast<const Error *>(&e)) {
    j["error"] = pe->kind();
    if (const auto *ve = dynamic_cast<const ValidationError *>(&e))
      j["field"] = ve->field();
    if (const auto *pa = dynamic_cast<const ParseError *>(&e))
      j["line"] = pa->line();
  } else {
    j["error"] = "internal";
  }
  j["message"] = e.what();
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace prsmos
