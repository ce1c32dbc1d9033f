// src/simulate.cc

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

#include "prsmos/simulate.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "prsmos/errors.h"
#include "prsmos/report.h"
#include "prsmos/rng.h"

namespace prsmos {

namespace {

constexpr std::size_t kNuisanceFactors = 2;

struct Embedding {
  std::vector<double> linear;     // a_j
  std::vector<double> quadratic;  // b_j
  std::vector<std::array<double, kNuisanceFactors>> nuisance;  // c_j
  std::vector<double> offset;     // o_j
};

Embedding make_embedding(const SimConfig &cfg) {
  const std::size_t d = cfg.feature_dim;
  const std::size_t informative = std::max<std::size_t>(1, d / 2);
  Embedding e;
  e.linear.assign(d, 0.0);
  e.quadratic.assign(d, 0.0);
  e.nuisance.assign(d, {});
  e.offset.assign(d, 0.0);

  Rng rng = make_rng(cfg.embedding_seed, "sim.embedding");
  std::normal_distribution<double> normal(0.0, 1.0);
  e.linear[0] = 1.0;
  for (std::size_t j = 1; j < d; ++j) {
    if (j < informative) {
      e.linear[j] = normal(rng);
      e.quadratic[j] = 0.5 * normal(rng);
      for (auto &c : e.nuisance[j]) c = 0.3 * normal(rng);
    } else {
      for (auto &c : e.nuisance[j]) c = normal(rng);
    }
  }

  // The perturbation is always drawn so that every shift magnitude moves
  // along the same direction.
  Rng drng = make_rng(cfg.embedding_seed, "sim.domain");
  const double s = cfg.domain_shift;
  for (std::size_t j = 0; j < d; ++j) {
    const double dl = normal(drng), dq = normal(drng), doff = normal(drng);
    if (j < informative) {
      e.linear[j] += s * dl;
      e.quadratic[j] += 0.5 * s * dq;
    }
    e.offset[j] += s * doff;
  }
  return e;
}

struct SystemDraws {
  std::vector<double> quality;
  std::vector<std::array<double, kNuisanceFactors>> nuisance;
};

SystemDraws draw_systems(const SimConfig &cfg) {
  Rng rng = make_rng(cfg.seed, "sim.systems");
  std::uniform_real_distribution<double> uniform(1.0, 5.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  SystemDraws out;
  for (std::size_t s = 0; s < cfg.n_systems; ++s) {
    out.quality.push_back(uniform(rng));
    std::array<double, kNuisanceFactors> u{};
    for (auto &v : u) v = normal(rng);
    out.nuisance.push_back(u);
  }
  return out;
}

std::string system_name(const SimConfig &cfg, std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sys%03zu", s);
  return cfg.id_prefix + buf;
}

}  // namespace

void SimConfig::validate() const {
  if (n_systems == 0) throw ValidationError("sim.n_systems", "must be positive");
  if (samples_per_system == 0)
    throw ValidationError("sim.samples_per_system", "must be positive");
  if (raters_per_sample == 0)
    throw ValidationError("sim.raters_per_sample", "must be positive");
  if (feature_dim == 0)
    throw ValidationError("sim.feature_dim", "must be positive");
  for (auto [name, v] :
       {std::pair{"sim.quality_noise_sd", quality_noise_sd},
        std::pair{"sim.feature_noise_sd", feature_noise_sd},
        std::pair{"sim.listener_shift_sd", listener_shift_sd},
        std::pair{"sim.rating_noise_sd", rating_noise_sd},
        std::pair{"sim.domain_shift", domain_shift}}) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError(name, "must be a nonnegative real");
  }
  if (!std::isfinite(listener_bias_shift))
    throw ValidationError("sim.listener_bias_shift", "must be finite");
  if (!(listener_bias_scale > 0.0) || !std::isfinite(listener_bias_scale))
    throw ValidationError("sim.listener_bias_scale", "must be positive");
}

double clip_round(double v) { return std::clamp(std::round(v), 1.0, 5.0); }

Dataset simulate_dataset(const SimConfig &cfg) {
  cfg.validate();
  const Embedding emb = make_embedding(cfg);
  const SystemDraws systems = draw_systems(cfg);

  Rng rng = make_rng(cfg.seed, "sim.samples");
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<DatasetRecord> records;
  records.reserve(cfg.n_systems * cfg.samples_per_system);
  const std::size_t d = cfg.feature_dim;
  for (std::size_t s = 0; s < cfg.n_systems; ++s) {
    const std::string sys = system_name(cfg, s);
    for (std::size_t k = 0; k < cfg.samples_per_system; ++k) {
      const double latent =
          systems.quality[s] + cfg.quality_noise_sd * normal(rng);
      const double z = (latent - 3.0) / 2.0;

      DatasetRecord r;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_u%04zu", k);
      r.id = sys + buf;
      r.system_id = sys;
      r.features.resize(d);
      for (std::size_t j = 0; j < d; ++j) {
        double f = emb.linear[j] * z + emb.quadratic[j] * (z * z - 1.0 / 3.0) +
                   emb.offset[j];
        for (std::size_t q = 0; q < kNuisanceFactors; ++q)
          f += emb.nuisance[j][q] * systems.nuisance[s][q];
        r.features[j] = f + cfg.feature_noise_sd * normal(rng);
      }

      double total = 0.0;
      for (std::size_t rater = 0; rater < cfg.raters_per_sample; ++rater) {
        const double shift =
            cfg.listener_bias_shift + cfg.listener_shift_sd * normal(rng);
        const double perceived = 3.0 +
                                 cfg.listener_bias_scale * (latent - 3.0) +
                                 shift + cfg.rating_noise_sd * normal(rng);
        total += clip_round(perceived);
      }
      r.mos = total / static_cast<double>(cfg.raters_per_sample);
      records.push_back(std::move(r));
    }
  }
  return Dataset(cfg.id_prefix + "sim", std::move(records));
}

std::vector<std::pair<std::string, double>> simulated_system_qualities(
    const SimConfig &cfg) {
  cfg.validate();
  const SystemDraws systems = draw_systems(cfg);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t s = 0; s < cfg.n_systems; ++s)
    out.emplace_back(system_name(cfg, s), systems.quality[s]);
  return out;
}

DistortionSpec DistortionSpec::shift(double c, DistortionTarget target) {
  if (!std::isfinite(c)) throw ValidationError("distortion.shift", "must be finite");
  return DistortionSpec(DistortionKind::kShift, 1.0, c, target);
}

DistortionSpec DistortionSpec::affine(double a, double b,
                                      DistortionTarget target) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw ValidationError("distortion.affine",
                          "slope must be positive for a strictly increasing map");
  return DistortionSpec(DistortionKind::kAffine, a, b, target);
}

DistortionSpec DistortionSpec::monotone_cubic(DistortionTarget target) {
  return DistortionSpec(DistortionKind::kMonotoneCubic, 1.0, 0.0, target);
}

double DistortionSpec::operator()(double x) const {
  switch (kind_) {
    case DistortionKind::kShift: return x + b_;
    case DistortionKind::kAffine: return a_ * x + b_;
    case DistortionKind::kMonotoneCubic: {
      const double t = x - 3.0;
      return x + t * t * t;
    }
  }
  return x;
}

std::string DistortionSpec::describe() const {
  std::string target =
      target_ == DistortionTarget::kTruth ? "truth" : "predictions";
  switch (kind_) {
    case DistortionKind::kShift:
      return "shift(" + format_double(b_) + ") on " + target;
    case DistortionKind::kAffine:
      return "affine(" + format_double(a_) + "," + format_double(b_) + ") on " +
             target;
    case DistortionKind::kMonotoneCubic:
      return "monotone_cubic on " + target;
  }
  return "?";
}

std::vector<double> distort(std::span<const double> values,
                            const DistortionSpec &spec) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](double v) { return spec(v); });
  return out;
}

DistortionReport run_distortion_experiment(const Regressor &model,
                                           const Dataset &test,
                                           const DistortionSpec &spec) {
  const auto pred = predict(model, test);
  const auto truth = test.labels();
  DistortionReport r;
  r.distortion = spec.describe();
  r.before = evaluate(pred, truth, MetricLevel::kUtterance);
  if (spec.target() == DistortionTarget::kTruth)
    r.after = evaluate(pred, distort(truth, spec), MetricLevel::kUtterance);
  else
    r.after = evaluate(distort(pred, spec), truth, MetricLevel::kUtterance);
  return r;
}

nlohmann::ordered_json to_json(const DistortionReport &r) {
  nlohmann::ordered_json j;
  j["distortion"] = r.distortion;
  j["before"] = to_json(r.before);
  j["after"] = to_json(r.after);
  auto delta = [](const std::optional<double> &a,
                  const std::optional<double> &b) {
    return a && b ? nlohmann::ordered_json(*b - *a)
                  : nlohmann::ordered_json(nullptr);
  };
  j["mse_delta"] = r.after.mse - r.before.mse;
  j["lcc_delta"] = delta(r.before.lcc, r.after.lcc);
  j["srcc_delta"] = delta(r.before.srcc, r.after.srcc);
  j["ktau_delta"] = delta(r.before.ktau, r.after.ktau);
  return j;
}

ComparisonTable run_loss_comparison(const SimConfig &sim,
                                    const std::vector<LossArm> &arms,
                                    const TrainConfig &train_cfg,
                                    const ModelSpec &model_spec,
                                    const SplitSpec &split_spec) {
  const Dataset ds = simulate_dataset(sim);
  const DatasetSplit parts = split(ds, split_spec);
  const Regressor init = model_spec.build(ds.dim());

  ComparisonTable table;
  for (const auto &arm : arms) {
    TrainConfig cfg = train_cfg;
    cfg.loss = arm.loss;
    TrainResult tr = train(init, parts.train, parts.dev, cfg);
    table.arms.push_back(ArmResult{
        arm.name, evaluate_levels(predict(tr.model, parts.test), parts.test),
        std::move(tr.log)});
  }
  return table;
}

std::string comparison_csv(const ComparisonTable &table) {
  std::ostringstream out;
  out << "family,level,n,mse,lcc,srcc,ktau,status\n";
  for (const auto &arm : table.arms) {
    for (const MetricReport *r : {&arm.test.utterance, &arm.test.system}) {
      out << arm.name << ',' << to_string(r->level) << ',' << r->n << ','
          << format_double(r->mse) << ',' << format_optional(r->lcc) << ','
          << format_optional(r->srcc) << ',' << format_optional(r->ktau) << ','
          << (r->ok() ? "ok" : "undefined") << '\n';
    }
  }
  return out.str();
}

nlohmann::ordered_json comparison_json(const ComparisonTable &table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto &arm : table.arms) {
    for (const MetricReport *r : {&arm.test.utterance, &arm.test.system}) {
      nlohmann::ordered_json row;
      row["family"] = arm.name;
      const nlohmann::ordered_json metrics = to_json(*r);
      for (auto &[k, v] : metrics.items()) row[k] = v;
      row["best_epoch"] = arm.log.best_epoch;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string srcc_curves_csv(const ComparisonTable &table) {
  std::ostringstream out;
  out << "epoch,family,dev_srcc\n";
  for (const auto &arm : table.arms) {
    for (const auto &e : arm.log.epochs)
      out << e.epoch << ',' << arm.name << ','
          << format_optional(e.dev_utterance.srcc) << '\n';
  }
  return out.str();
}

OodScenario simulate_ood_scenario(const OodScenarioConfig &cfg) {
  OodScenario sc;
  const Dataset source = simulate_dataset(cfg.source);
  SplitSpec src_split{0.8, 0.2, 0.0, substream_seed(cfg.seed, "ood.source"),
                      false};
  auto src = split(source, src_split);
  sc.source_train = std::move(src.train);
  sc.source_dev = std::move(src.dev);

  const Dataset target = simulate_dataset(cfg.target);
  const double pool_fraction =
      1.0 - cfg.target_dev_fraction - cfg.target_test_fraction;
  SplitSpec tgt_split{pool_fraction, cfg.target_dev_fraction,
                      cfg.target_test_fraction,
                      substream_seed(cfg.seed, "ood.target"), false};
  auto tgt = split(target, tgt_split);
  sc.target_dev = std::move(tgt.dev);
  sc.target_test = std::move(tgt.test);

  if (cfg.target_labeled > tgt.train.size())
    throw ValidationError("ood.target_labeled", "exceeds the target pool size");
  std::vector<std::size_t> order(tgt.train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(cfg.seed, "ood.labeled");
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> labeled(order.begin(),
                                   order.begin() + static_cast<std::ptrdiff_t>(cfg.target_labeled));
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(cfg.target_labeled),
                                order.end());
  std::sort(labeled.begin(), labeled.end());
  std::sort(rest.begin(), rest.end());
  sc.target_labeled = tgt.train.subset(labeled, "target.labeled");
  sc.target_unlabeled_truth = tgt.train.subset(rest, "target.unlabeled_truth");
  std::vector<DatasetRecord> stripped = sc.target_unlabeled_truth.records();
  for (auto &r : stripped) r.mos.reset();
  sc.target_unlabeled = Dataset("target.unlabeled", std::move(stripped));
  return sc;
}

}  // namespace prsmos
