// tests/unit/test_semisup.cc

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

#include <map>
#include <set>
#include <sstream>

#include "oracles.h"
#include "prsmos/errors.h"
#include "prsmos/semisup.h"
#include "prsmos/simulate.h"

using namespace prsmos;

namespace {

PseudoLabelPool pool_of(const std::vector<double> &values) {
  PseudoLabelPool p;
  for (std::size_t i = 0; i < values.size(); ++i)
    p.records.push_back({"p" + std::to_string(i), "S", {0.0}, std::nullopt});
  p.pseudo_mos = values;
  p.generation = 1;
  return p;
}

std::map<std::size_t, std::size_t> per_bin(const PseudoLabelPool &pool,
                                           const std::vector<std::size_t> &sel,
                                           const BApMOSConfig &cfg) {
  const Histogram h = build_histogram(pool.pseudo_mos, cfg);
  std::map<std::size_t, std::size_t> out;
  for (std::size_t i : sel) ++out[h.bin_of[i]];
  return out;
}

std::string log_text(const TrainLog &log) {
  std::ostringstream out;
  write_train_log_csv(out, log);
  return out.str();
}

struct Scenario {
  OodScenario data;
  Regressor start;
};

Scenario scenario(std::uint64_t seed) {
  OodScenarioConfig oc;
  oc.source.n_systems = 12;
  oc.source.samples_per_system = 12;
  oc.source.feature_dim = 8;
  oc.source.seed = seed;
  oc.target = oc.source;
  oc.target.domain_shift = 0.5;
  oc.target.listener_bias_shift = 0.5;
  oc.target.id_prefix = "t_";
  oc.target.seed = seed + 100;
  oc.target_labeled = 12;
  oc.seed = seed;
  Scenario s{simulate_ood_scenario(oc), init_regressor(Architecture::kMlp, {8, 8, 1}, seed)};
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.epochs = 10;
  s.start = train(s.start, s.data.source_train, s.data.source_dev, tc).model;
  return s;
}

SemiSupConfig base_config(const Scenario &s) {
  SemiSupConfig c;
  c.labeled = s.data.target_labeled;
  c.unlabeled = s.data.target_unlabeled;
  c.dev = s.data.target_dev;
  c.start_model = s.start;
  c.train.learning_rate = 0.01;
  c.train.epochs = 8;
  c.train.batch_size = 8;
  c.rounds_max = 4;
  c.model_spec.hidden = {8};
  return c;
}

}  // namespace

TEST_CASE("generate_pseudo") {
  Regressor constant(Architecture::kMlp, {2, 3, 1});
  constant.mutable_layers().back().bias(0) = 2.5;
  PseudoLabelPool pool;
  for (int i = 0; i < 5; ++i)
    pool.records.push_back({"r" + std::to_string(i), "S", {double(i), 1.0}, 4.0});
  pool.pseudo_mos.assign(5, 0.0);
  const PseudoLabelPool g = generate_pseudo(constant, pool);
  CHECK(g.generation == 1);
  CHECK(g.pseudo_mos == std::vector<double>(5, 2.5));
  CHECK(generate_pseudo(constant, g).generation == 2);

  const Regressor m = init_regressor(Architecture::kMlp, {2, 3, 1}, 4);
  const PseudoLabelPool h = generate_pseudo(m, make_pool(Dataset("d", pool.records)));
  CHECK(h.pseudo_mos == predict(m, Dataset("d", pool.records)));
  for (const auto &r : h.records) CHECK_FALSE(r.mos);
  CHECK_THROWS_AS(generate_pseudo(init_regressor(Architecture::kLinear, {3, 1}, 0), pool),
                  DimensionError);
}

TEST_CASE("bapmos: counts 5, 3, 7 give 3 per bin") {
  std::vector<double> v(5, 0.1);
  v.insert(v.end(), 3, 1.5);
  v.insert(v.end(), 7, 2.9);
  const PseudoLabelPool pool = pool_of(v);
  BApMOSConfig cfg;
  cfg.bins = 3;
  cfg.seed = 1;
  const Histogram h = build_histogram(v, cfg);
  CHECK(h.counts == std::vector<std::size_t>{5, 3, 7});
  const auto sel = bapmos_select(pool, cfg);
  CHECK(sel.size() == 9);
  for (const auto &[bin, count] : per_bin(pool, sel, cfg)) CHECK(count == 3);
  CHECK(sel == bapmos_select(pool, cfg));
  CHECK(std::is_sorted(sel.begin(), sel.end()));
}

TEST_CASE("bapmos: a single occupied bin returns the whole pool") {
  const PseudoLabelPool pool = pool_of(std::vector<double>(6, 3.3));
  BApMOSConfig cfg;
  CHECK(bapmos_select(pool, cfg) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(bapmos_select(pool_of({}), cfg), ValidationError);
}

TEST_CASE("bapmos: balance property over random pools") {
  oracle::Gen gen(30);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v;
    const std::size_t n = gen.index(1, 120);
    // Skewed mixture so bins are unevenly filled, sometimes empty.
    for (std::size_t i = 0; i < n; ++i)
      v.push_back(gen.uniform(0, 1) < 0.7 ? gen.uniform(3.5, 4.5) : gen.uniform(0, 6));
    BApMOSConfig cfg;
    cfg.bins = gen.index(1, 12);
    cfg.seed = t;
    if (t % 3 == 0) {
      cfg.range_policy = RangePolicy::kFixed;
      cfg.range_lo = 1;
      cfg.range_hi = 5;
    }
    const PseudoLabelPool pool = pool_of(v);
    const Histogram h = build_histogram(v, cfg);
    std::size_t nonempty = 0, m = SIZE_MAX;
    for (std::size_t c : h.counts)
      if (c) {
        ++nonempty;
        m = std::min(m, c);
      }
    const auto sel = bapmos_select(pool, cfg);
    CHECK(sel.size() == nonempty * m);
    CHECK(std::set<std::size_t>(sel.begin(), sel.end()).size() == sel.size());
    CHECK(sel.back() < n);
    const auto bins = per_bin(pool, sel, cfg);
    CHECK(bins.size() == nonempty);
    for (const auto &[bin, count] : bins) CHECK(count == m);
  }
}

TEST_CASE("pseudo-labeled subset carries the generating predictions") {
  const PseudoLabelPool pool = pool_of({1.25, 2.5, 3.75});
  const Dataset d = pseudo_labeled_subset(pool, {0, 2}, "x");
  CHECK(d.size() == 2);
  CHECK(*d[0].mos == 1.25);
  CHECK(*d[1].mos == 3.75);
  const std::string snap = pseudo_snapshot_jsonl(pool);
  CHECK(snap.find(R"({"id":"p1","pseudo_mos":2.5,"generation":1})") != std::string::npos);
}

TEST_CASE("semisup with labels only is exactly a train run") {
  const Scenario s = scenario(1);
  SemiSupConfig c = base_config(s);
  c.unlabeled = Dataset("none");
  c.start_model.reset();
  const SemiSupResult r = run_semisup(c);
  REQUIRE(r.rounds.size() == 1);
  const TrainResult t = train(c.model_spec.build(c.labeled.dim()), c.labeled, c.dev, c.train);
  CHECK(log_text(*r.rounds[0].log) == log_text(t.log));
  CHECK(r.model.flat_parameters() == t.model.flat_parameters());
}

TEST_CASE("semisup zero-shot with nothing to train on scores the start model") {
  const Scenario s = scenario(2);
  SemiSupConfig c = base_config(s);
  c.labeled = Dataset("none");
  c.unlabeled = Dataset("none");
  const SemiSupResult r = run_semisup(c);
  REQUIRE(r.rounds.size() == 1);
  CHECK_FALSE(r.rounds[0].log);
  CHECK(r.model.flat_parameters() == s.start.flat_parameters());
  CHECK(*r.dev_utterance.srcc == srcc(predict(s.start, c.dev), c.dev.labels()));
}

TEST_CASE("semisup needs a start model without labels") {
  const Scenario s = scenario(3);
  SemiSupConfig c = base_config(s);
  c.labeled = Dataset("none");
  c.start_model.reset();
  CHECK_THROWS_AS(run_semisup(c), ValidationError);
}

TEST_CASE("semisup: accepted rounds strictly improve and later rounds regenerate") {
  for (std::uint64_t seed : {4, 5, 6}) {
    const Scenario s = scenario(seed);
    SemiSupConfig c = base_config(s);
    c.labeled = Dataset("none");
    const SemiSupResult r = run_semisup(c);
    double last = -2;
    for (const RoundRecord &rec : r.rounds) {
      if (!rec.accepted) continue;
      CHECK(*rec.dev_utterance.srcc > last);
      last = *rec.dev_utterance.srcc;
    }
    CHECK(*r.dev_utterance.srcc == last);
    for (std::size_t k = 1; k < r.rounds.size(); ++k) {
      CHECK(r.rounds[k].generation == k);
      CHECK(r.rounds[k].pseudo_count == r.rounds[k].selected.size());
    }
    // Only the last round can be a rejected one.
    for (std::size_t k = 0; k + 1 < r.rounds.size(); ++k) CHECK(r.rounds[k].accepted);
  }
}

TEST_CASE("semisup without regeneration labels the pool once") {
  const Scenario s = scenario(7);
  SemiSupConfig c = base_config(s);
  c.regenerate_on_dev_improvement = false;
  const SemiSupResult r = run_semisup(c);
  for (std::size_t k = 1; k < r.rounds.size(); ++k) CHECK(r.rounds[k].generation == 1);
}

TEST_CASE("semisup reduction: all pseudo labels, one round, no labeled data") {
  const Scenario s = scenario(8);
  SemiSupConfig c = base_config(s);
  c.labeled = Dataset("none");
  c.selection = SelectionKind::kAll;
  c.rounds_max = 1;
  const SemiSupResult r = run_semisup(c);
  REQUIRE(r.rounds.size() == 2);
  const RoundRecord &one = r.rounds[1];
  CHECK(one.pseudo_count == c.unlabeled.size());
  CHECK(one.generation == 1);
  const PseudoLabelPool expect = generate_pseudo(s.start, make_pool(c.unlabeled));
  CHECK(one.pseudo_snapshot == pseudo_snapshot_jsonl(expect));
}
