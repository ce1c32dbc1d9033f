// src/semisup.cc

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

#include "prsmos/semisup.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

#include "prsmos/errors.h"
#include "prsmos/rng.h"

namespace prsmos {

PseudoLabelPool make_pool(const Dataset &ds) {
  PseudoLabelPool pool;
  pool.records = ds.records();
  for (auto &r : pool.records) r.mos.reset();
  pool.pseudo_mos.assign(pool.records.size(), 0.0);
  return pool;
}

PseudoLabelPool generate_pseudo(const Regressor &model,
                                const PseudoLabelPool &pool) {
  PseudoLabelPool out = pool;
  out.pseudo_mos = predict(model, Dataset("pool", pool.records));
  ++out.generation;
  return out;
}

Dataset pseudo_labeled_subset(const PseudoLabelPool &pool,
                              const std::vector<std::size_t> &indices,
                              std::string name) {
  std::vector<DatasetRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    DatasetRecord r = pool.records.at(i);
    r.mos = pool.pseudo_mos.at(i);
    out.push_back(std::move(r));
  }
  return Dataset(std::move(name), std::move(out));
}

std::string pseudo_snapshot_jsonl(const PseudoLabelPool &pool) {
  std::ostringstream out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = pool.records[i].id;
    j["pseudo_mos"] = pool.pseudo_mos[i];
    j["generation"] = pool.generation;
    out << j.dump() << '\n';
  }
  return out.str();
}

void BApMOSConfig::validate() const {
  if (bins == 0) throw ValidationError("bapmos.bins", "must be >= 1");
  if (range_policy == RangePolicy::kFixed &&
      !(std::isfinite(range_lo) && std::isfinite(range_hi) &&
        range_lo < range_hi))
    throw ValidationError("bapmos.range", "fixed range needs lo < hi");
}

Histogram build_histogram(const std::vector<double> &values,
                          const BApMOSConfig &cfg) {
  cfg.validate();
  Histogram h;
  if (cfg.range_policy == RangePolicy::kFixed) {
    h.lo = cfg.range_lo;
    h.hi = cfg.range_hi;
  } else if (!values.empty()) {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    h.lo = *mn;
    h.hi = *mx;
  }
  h.counts.assign(cfg.bins, 0);
  h.bin_of.reserve(values.size());
  const double width = (h.hi - h.lo) / static_cast<double>(cfg.bins);
  for (double v : values) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = std::floor((v - h.lo) / width);
      if (pos > 0.0)
        bin = std::min(static_cast<std::size_t>(pos), cfg.bins - 1);
    }
    h.bin_of.push_back(bin);
    ++h.counts[bin];
  }
  return h;
}

std::vector<std::size_t> bapmos_select(const PseudoLabelPool &pool,
                                       const BApMOSConfig &cfg) {
  if (pool.empty()) throw ValidationError("pool", "cannot select from an empty pool");
  const Histogram h = build_histogram(pool.pseudo_mos, cfg);

  std::vector<std::vector<std::size_t>> members(cfg.bins);
  for (std::size_t i = 0; i < h.bin_of.size(); ++i)
    members[h.bin_of[i]].push_back(i);

  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (std::size_t c : h.counts)
    if (c > 0) min_count = std::min(min_count, c);

  Rng rng = make_rng(cfg.seed, "bapmos");
  std::vector<std::size_t> selected;
  for (const auto &bin : members) {
    if (bin.empty()) continue;
    std::sample(bin.begin(), bin.end(), std::back_inserter(selected), min_count,
                rng);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

Regressor ModelSpec::build(std::size_t input_dim) const {
  std::vector<std::size_t> sizes{input_dim};
  if (architecture == Architecture::kMlp)
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return init_regressor(architecture, std::move(sizes), seed, activation);
}

void SemiSupConfig::validate() const {
  train.validate();
  bapmos.validate();
  if (dev.empty() || !dev.fully_labeled())
    throw ValidationError("semisup.dev", "dev must be labeled and nonempty");
  if (!labeled.fully_labeled())
    throw ValidationError("semisup.labeled", "labeled set has unlabeled records");
  if (labeled.empty() && unlabeled.empty() && !start_model)
    throw ValidationError("semisup", "nothing to train on and no starting model");
  if (labeled.empty() && !start_model)
    throw ValidationError("semisup.start_checkpoint",
                          "a starting model is required when there are no labels");
  if (rounds_max == 0)
    throw ValidationError("semisup.rounds_max", "must be positive");
}

namespace {

// Round 0 uses the base config untouched so a labels-only run is exactly a
// plain train() call.
TrainConfig round_train_config(const TrainConfig &base, std::size_t round) {
  TrainConfig cfg = base;
  if (round > 0) cfg.seed = substream_seed(base.seed, "semisup.round", round);
  return cfg;
}

void score(RoundRecord &rec, const Regressor &model, const Dataset &dev) {
  const auto reports = evaluate_levels(predict(model, dev), dev);
  rec.dev_utterance = reports.utterance;
  rec.dev_system = reports.system;
  if (!rec.dev_utterance.srcc)
    throw UndefinedMetricError("dev SRCC undefined in round " +
                               std::to_string(rec.round));
}

}  // namespace

SemiSupResult run_semisup(const SemiSupConfig &cfg) {
  cfg.validate();

  RoundRecord first;
  first.round = 0;
  first.labeled_count = cfg.labeled.size();
  first.pool_size = cfg.unlabeled.size();
  Regressor best = cfg.start_model ? *cfg.start_model
                                   : cfg.model_spec.build(cfg.labeled.dim());
  if (!cfg.labeled.empty()) {
    TrainResult tr = train(best, cfg.labeled, cfg.dev,
                           round_train_config(cfg.train, 0));
    best = std::move(tr.model);
    first.log = std::move(tr.log);
  }
  score(first, best, cfg.dev);
  first.accepted = true;
  double best_srcc = *first.dev_utterance.srcc;

  SemiSupResult result{best, {}, first.dev_utterance, first.dev_system};
  result.rounds.push_back(std::move(first));

  PseudoLabelPool pool = make_pool(cfg.unlabeled);
  for (std::size_t round = 1; round <= cfg.rounds_max && !pool.empty();
       ++round) {
    if (pool.generation == 0 || cfg.regenerate_on_dev_improvement)
      pool = generate_pseudo(best, pool);

    RoundRecord rec;
    rec.round = round;
    rec.labeled_count = cfg.labeled.size();
    rec.pool_size = pool.size();
    rec.generation = pool.generation;
    rec.pseudo_snapshot = pseudo_snapshot_jsonl(pool);
    if (cfg.selection == SelectionKind::kBapmos) {
      BApMOSConfig bcfg = cfg.bapmos;
      bcfg.seed = substream_seed(cfg.bapmos.seed, "bapmos.round", round);
      rec.selected = bapmos_select(pool, bcfg);
    } else {
      rec.selected.resize(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) rec.selected[i] = i;
    }
    if (rec.selected.empty())
      throw ZeroSelectionError("round " + std::to_string(round) +
                               " selected no pseudo labels");
    rec.pseudo_count = rec.selected.size();

    const Dataset pseudo = pseudo_labeled_subset(pool, rec.selected, "pseudo");
    const Dataset merged = cfg.labeled.empty()
                               ? pseudo
                               : concat(cfg.labeled, pseudo, "labeled+pseudo");
    TrainResult tr =
        train(best, merged, cfg.dev, round_train_config(cfg.train, round));
    score(rec, tr.model, cfg.dev);
    rec.log = std::move(tr.log);
    rec.accepted = *rec.dev_utterance.srcc > best_srcc;
    if (rec.accepted) {
      best = std::move(tr.model);
      best_srcc = *rec.dev_utterance.srcc;
      result.dev_utterance = rec.dev_utterance;
      result.dev_system = rec.dev_system;
    }
    const bool stop = !rec.accepted;
    result.rounds.push_back(std::move(rec));
    if (stop) break;
  }
  result.model = std::move(best);
  return result;
}

nlohmann::ordered_json round_summary_json(const RoundRecord &r) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["labeled"] = r.labeled_count;
  j["unlabeled"] = r.pool_size;
  j["selected"] = r.pseudo_count;
  j["generation"] = r.generation;
  j["accepted"] = r.accepted;
  j["epochs"] = r.log ? r.log->epochs.size() : 0;
  j["dev_utterance"] = to_json(r.dev_utterance);
  j["dev_system"] = to_json(r.dev_system);
  return j;
}

}  // namespace prsmos
