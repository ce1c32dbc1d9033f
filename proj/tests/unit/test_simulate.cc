// tests/unit/test_simulate.cc

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
#include <cmath>
#include <map>
#include <sstream>

#include "oracles.h"
#include "prsmos/errors.h"
#include "prsmos/metrics.h"
#include "prsmos/simulate.h"

using namespace prsmos;

namespace {

using V = std::vector<double>;

SimConfig small(std::uint64_t seed) {
  SimConfig c;
  c.n_systems = 10;
  c.samples_per_system = 10;
  c.feature_dim = 6;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("labels are multiples of 1/R within [1, 5]") {
  for (std::size_t r : {1, 3, 8}) {
    SimConfig c = small(1);
    c.raters_per_sample = r;
    const Dataset ds = simulate_dataset(c);
    for (const auto &rec : ds.records()) {
      const double v = *rec.mos;
      CHECK(v >= 1.0);
      CHECK(v <= 5.0);
      const double scaled = v * static_cast<double>(r);
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
    }
  }
}

TEST_CASE("noise-free features track the label") {
  SimConfig c = small(2);
  c.feature_noise_sd = 0;
  c.quality_noise_sd = 0;
  c.raters_per_sample = 400;
  c.n_systems = 30;
  const Dataset ds = simulate_dataset(c);
  V coord0;
  for (const auto &r : ds.records()) coord0.push_back(r.features[0]);
  CHECK(srcc(coord0, ds.labels()) > 0.97);
}

TEST_CASE("simulation is a pure function of the seed") {
  const SimConfig c = small(3);
  CHECK(serialize_dataset(simulate_dataset(c), DataFormat::kJsonl) ==
        serialize_dataset(simulate_dataset(c), DataFormat::kJsonl));
  SimConfig other = c;
  other.seed = 4;
  CHECK(serialize_dataset(simulate_dataset(other), DataFormat::kJsonl) !=
        serialize_dataset(simulate_dataset(c), DataFormat::kJsonl));
}

TEST_CASE("system means follow the true qualities at R = 50, 50 samples per system") {
  for (std::uint64_t seed : {1, 2, 3}) {
    SimConfig c;
    c.n_systems = 10;
    c.samples_per_system = 50;
    c.raters_per_sample = 50;
    c.seed = seed;
    const Dataset ds = simulate_dataset(c);
    std::map<std::string, std::pair<double, double>> acc;
    for (const auto &r : ds.records()) {
      acc[r.system_id].first += *r.mos;
      acc[r.system_id].second += 1;
    }
    std::vector<std::pair<double, double>> rows;  // (true quality, mean label)
    for (const auto &[id, q] : simulated_system_qualities(c))
      rows.emplace_back(q, acc[id].first / acc[id].second);
    std::sort(rows.begin(), rows.end());
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        inversions += rows[j].second < rows[i].second;
    CHECK(inversions == 0);
  }
}

TEST_CASE("clip_round rounds half away from zero then clips") {
  CHECK(clip_round(2.5) == 3);
  CHECK(clip_round(3.49) == 3);
  CHECK(clip_round(0.2) == 1);
  CHECK(clip_round(-3) == 1);
  CHECK(clip_round(7.7) == 5);
  CHECK(clip_round(4.5) == 5);
}

TEST_CASE("distort examples") {
  CHECK(distort(V{1, 2, 3}, DistortionSpec::shift(100)) == V{101, 102, 103});
  CHECK(distort(V{1, 2.5, 3}, DistortionSpec::affine(1, 0)) == V{1, 2.5, 3});
  const V x{4.2, 1.1, 3.0, 2.9, 5.0};
  const V c = distort(x, DistortionSpec::monotone_cubic());
  CHECK(fractional_ranks(c) == fractional_ranks(x));
  CHECK_THROWS_AS(DistortionSpec::affine(0, 1), ValidationError);
  CHECK_THROWS_AS(DistortionSpec::affine(-2, 1), ValidationError);
}

TEST_CASE("distortion experiment identities") {
  SimConfig sc = small(5);
  const Dataset ds = simulate_dataset(sc);
  const Regressor m = init_regressor(Architecture::kMlp, {6, 5, 1}, 3);
  const V pred = predict(m, ds);
  V resid(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) resid[i] = pred[i] - *ds[i].mos;

  const DistortionReport s = run_distortion_experiment(m, ds, DistortionSpec::shift(100));
  CHECK(*s.after.srcc == *s.before.srcc);
  CHECK(*s.after.ktau == *s.before.ktau);
  CHECK(s.after.mse - s.before.mse ==
        doctest::Approx(10000 - 200 * oracle::mean(resid)).epsilon(1e-12));
  const auto j = to_json(s);
  CHECK(j["srcc_delta"] == 0.0);
  CHECK(j["ktau_delta"] == 0.0);

  const DistortionReport a = run_distortion_experiment(m, ds, DistortionSpec::affine(2, 1));
  CHECK(*a.after.srcc == *a.before.srcc);
  CHECK(*a.after.ktau == *a.before.ktau);
  CHECK(*a.after.lcc == doctest::Approx(*a.before.lcc).epsilon(1e-12));

  const DistortionReport c = run_distortion_experiment(m, ds, DistortionSpec::monotone_cubic());
  CHECK(*c.after.srcc == *c.before.srcc);
  CHECK(*c.after.ktau == *c.before.ktau);
  CHECK(std::abs(*c.after.lcc - *c.before.lcc) > 1e-6);

  const DistortionReport p = run_distortion_experiment(
      m, ds, DistortionSpec::shift(100, DistortionTarget::kPredictions));
  CHECK(*p.after.srcc == *p.before.srcc);
  CHECK(p.after.mse > p.before.mse);
}

TEST_CASE("loss comparison emits one row per family and level") {
  SimConfig sim = small(6);
  std::vector<LossArm> arms;
  for (LossFamily f : {LossFamily::kL1, LossFamily::kPrs, LossFamily::kUtmosMargin,
                       LossFamily::kCombined}) {
    LossConfig l;
    l.family = f;
    l.beta = 0.01;
    l.gamma = 0.1;
    arms.push_back({std::string(to_string(f)), l});
  }
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 16;
  ModelSpec ms;
  ms.hidden = {4};
  SplitSpec sp;
  const ComparisonTable t = run_loss_comparison(sim, arms, tc, ms, sp);
  const std::string csv = comparison_csv(t);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 2);
  CHECK(csv.rfind("family,level,n,mse,lcc,srcc,ktau,status\n", 0) == 0);
  CHECK(comparison_json(t).size() == 8);
  const std::string curves = srcc_curves_csv(t);
  std::size_t epochs = 0;
  for (const auto &arm : t.arms) epochs += arm.log.epochs.size();
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + epochs);
  CHECK(comparison_csv(run_loss_comparison(sim, arms, tc, ms, sp)) == csv);
}

TEST_CASE("ood scenario shapes") {
  OodScenarioConfig oc;
  oc.source = small(7);
  oc.target = small(8);
  oc.target.domain_shift = 1.0;
  oc.target.id_prefix = "t_";
  oc.target_labeled = 10;
  const OodScenario s = simulate_ood_scenario(oc);
  CHECK(s.target_labeled.size() == 10);
  CHECK(s.target_labeled.fully_labeled());
  CHECK(s.target_unlabeled.labeled().empty());
  CHECK(s.target_unlabeled.size() == s.target_unlabeled_truth.size());
  CHECK(s.target_unlabeled_truth.fully_labeled());
  CHECK(s.target_labeled.size() + s.target_unlabeled.size() + s.target_dev.size() +
            s.target_test.size() ==
        100);
  CHECK(s.source_train.size() + s.source_dev.size() == 100);
}

TEST_CASE("domain shift moves the feature embedding") {
  SimConfig a = small(9), b = small(9);
  b.domain_shift = 1.0;
  const Dataset da = simulate_dataset(a), db = simulate_dataset(b);
  CHECK(da.labels() == db.labels());
  CHECK(da[0].features != db[0].features);
}
