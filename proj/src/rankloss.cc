// src/rankloss.cc

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

#include "prsmos/rankloss.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prsmos/errors.h"

namespace prsmos {

namespace {

constexpr double kRootGuard = 1e-12;

void require_finite(std::span<const double> v, const char *field) {
  for (double x : v) {
    if (!std::isfinite(x))
      throw ValidationError(field, "input contains a non-finite value");
  }
}

void require_same_length(std::span<const double> yhat,
                         std::span<const double> y) {
  if (yhat.size() != y.size())
    throw DimensionError("length mismatch: " + std::to_string(yhat.size()) +
                         " predictions vs " + std::to_string(y.size()) +
                         " targets");
}

void require_pairs(std::size_t n, std::size_t cached) {
  if (n < 2 && cached == 0)
    throw ValidationError("batch", "rank losses need at least 2 samples (got " +
                                       std::to_string(n) + ")");
}

inline double sign(double t) { return (t > 0.0) - (t < 0.0); }

inline double pow_abs(double t, double p) {
  const double a = std::abs(t);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// d/dt |t|^p, with 0 at t = 0.
inline double dpow_abs(double t, double p) {
  if (t == 0.0) return 0.0;
  if (p == 1.0) return sign(t);
  if (p == 2.0) return 2.0 * t;
  return p * std::pow(std::abs(t), p - 1.0) * sign(t);
}

inline double pair_weight(double pred_diff, double true_diff, double lambda_c) {
  return pred_diff * true_diff <= 0.0 ? 1.0 : lambda_c;
}

// Inner sum S of a p-norm loss together with dS/dyhat.
struct InnerSum {
  double sum = 0.0;
  std::vector<double> dsum;
};

InnerSum prs_inner(std::span<const double> yhat, std::span<const double> y,
                   double lambda_c, double p) {
  const std::size_t n = yhat.size();
  InnerSum out{0.0, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pred_diff = yhat[i] - yhat[j];
      const double true_diff = y[i] - y[j];
      const double d = pred_diff - true_diff;
      const double w = pair_weight(pred_diff, true_diff, lambda_c);
      out.sum += w * pow_abs(d, p);
      const double g = w * dpow_abs(d, p);
      out.dsum[i] += g;
      out.dsum[j] -= g;
    }
  }
  return out;
}

// Adds the batch x cache block. Only the batch side receives gradient.
void add_cache_block(InnerSum &inner, std::span<const double> yhat,
                     std::span<const double> y, const ComparisonCache &cache,
                     double lambda_c, double p, double scale) {
  double block = 0.0;
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    double row_grad = 0.0;
    for (const auto &c : cache.entries()) {
      const double pred_diff = yhat[i] - c.prediction;
      const double true_diff = y[i] - c.target;
      const double d = pred_diff - true_diff;
      const double w = pair_weight(pred_diff, true_diff, lambda_c);
      block += w * pow_abs(d, p);
      row_grad += w * dpow_abs(d, p);
    }
    inner.dsum[i] += scale * row_grad;
  }
  inner.sum += scale * block;
}

// Applies the outer (.)^(1/p) and the chain rule.
LossResult finish(InnerSum inner, double p) {
  LossResult r;
  r.value = p == 1.0 ? inner.sum : std::pow(inner.sum, 1.0 / p);
  const double coeff =
      p == 1.0 ? 1.0
               : (1.0 / p) * std::pow(std::max(r.value, kRootGuard), 1.0 - p);
  r.grad = std::move(inner.dsum);
  if (coeff != 1.0) {
    for (double &g : r.grad) g *= coeff;
  }
  return r;
}

void check_inputs(std::span<const double> yhat, std::span<const double> y) {
  require_same_length(yhat, y);
  require_finite(yhat, "yhat");
  require_finite(y, "y");
}

}  // namespace

PartialRankMatrix::PartialRankMatrix(std::span<const double> scores)
    : n_(scores.size()), entries_(scores.size() * scores.size()) {
  if (scores.empty())
    throw ValidationError("scores", "partial rank matrix needs >= 1 value");
  require_finite(scores, "scores");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      entries_[i * n_ + j] = scores[i] - scores[j];
}

PartialRankMatrix partial_rank_matrix(std::span<const double> scores) {
  return PartialRankMatrix(scores);
}

std::string_view to_string(LossFamily family) {
  switch (family) {
    case LossFamily::kL1: return "L1";
    case LossFamily::kPrs: return "PRS";
    case LossFamily::kEprs: return "EPRS";
    case LossFamily::kCombined: return "COMBINED";
    case LossFamily::kUtmosMargin: return "UTMOS_MARGIN";
  }
  return "?";
}

LossFamily loss_family_from_string(std::string_view name) {
  for (auto f : {LossFamily::kL1, LossFamily::kPrs, LossFamily::kEprs,
                 LossFamily::kCombined, LossFamily::kUtmosMargin}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("loss.family", "unknown loss family '" +
                                           std::string(name) + "'");
}

void LossConfig::validate() const {
  if (!(p > 0.0) || !std::isfinite(p))
    throw ValidationError("loss.p", "must be a positive real");
  if (!(lambda_c >= 0.0 && lambda_c <= 1.0))
    throw ValidationError("loss.lambda_c", "must be in [0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("loss.alpha", "must be nonnegative");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw ValidationError("loss.beta", "must be nonnegative");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("loss.gamma", "must be nonnegative");
  if (!(cache_scale > 0.0) || !std::isfinite(cache_scale))
    throw ValidationError("loss.cache_scale", "must be positive");
}

void ComparisonCache::push(std::span<const double> yhat,
                           std::span<const double> y) {
  require_same_length(yhat, y);
  for (std::size_t i = 0; i < yhat.size(); ++i)
    entries_.push_back(Entry{yhat[i], y[i]});
  while (entries_.size() > capacity_) entries_.pop_front();
}

ComparisonCache cache_push(ComparisonCache cache, std::span<const double> yhat,
                           std::span<const double> y) {
  cache.push(yhat, y);
  return cache;
}

LossResult prs_loss(std::span<const double> yhat, std::span<const double> y,
                    const LossConfig &cfg) {
  check_inputs(yhat, y);
  require_pairs(yhat.size(), 0);
  return finish(prs_inner(yhat, y, cfg.lambda_c, cfg.p), cfg.p);
}

LossResult eprs_loss(std::span<const double> yhat, std::span<const double> y,
                     const ComparisonCache &cache, const LossConfig &cfg) {
  check_inputs(yhat, y);
  require_pairs(yhat.size(), cache.size());
  InnerSum inner = prs_inner(yhat, y, cfg.lambda_c, cfg.p);
  if (!cache.empty())
    add_cache_block(inner, yhat, y, cache, cfg.lambda_c, cfg.p,
                    cfg.cache_scale);
  return finish(std::move(inner), cfg.p);
}

LossResult l1_loss(std::span<const double> yhat, std::span<const double> y,
                   double p) {
  check_inputs(yhat, y);
  if (yhat.empty()) throw ValidationError("batch", "empty batch");
  InnerSum inner{0.0, std::vector<double>(yhat.size(), 0.0)};
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    const double d = yhat[i] - y[i];
    inner.sum += pow_abs(d, p);
    inner.dsum[i] = dpow_abs(d, p);
  }
  return finish(std::move(inner), p);
}

LossResult combined_loss(std::span<const double> yhat,
                         std::span<const double> y,
                         const ComparisonCache &cache, const LossConfig &cfg) {
  LossResult rank = eprs_loss(yhat, y, cache, cfg);
  LossResult abs = l1_loss(yhat, y, cfg.p);
  LossResult out;
  out.value = cfg.alpha * rank.value + cfg.beta * abs.value;
  out.grad.resize(yhat.size());
  for (std::size_t i = 0; i < yhat.size(); ++i)
    out.grad[i] = cfg.alpha * rank.grad[i] + cfg.beta * abs.grad[i];
  return out;
}

LossResult utmos_margin_loss(std::span<const double> yhat,
                             std::span<const double> y, double gamma,
                             double p) {
  check_inputs(yhat, y);
  require_pairs(yhat.size(), 0);
  if (!(gamma >= 0.0)) throw ValidationError("loss.gamma", "must be >= 0");
  const std::size_t n = yhat.size();
  InnerSum inner{0.0, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (yhat[i] - yhat[j]) - (y[i] - y[j]);
      const double hinge = std::max(0.0, std::abs(d) - gamma);
      inner.sum += pow_abs(hinge, p);
      if (hinge > 0.0) {
        const double g = dpow_abs(hinge, p) * sign(d);
        inner.dsum[i] += g;
        inner.dsum[j] -= g;
      }
    }
  }
  return finish(std::move(inner), p);
}

LossResult evaluate_loss(std::span<const double> yhat,
                         std::span<const double> y,
                         const ComparisonCache &cache, const LossConfig &cfg) {
  switch (cfg.family) {
    case LossFamily::kL1: return l1_loss(yhat, y, cfg.p);
    case LossFamily::kPrs: return prs_loss(yhat, y, cfg);
    case LossFamily::kEprs: return eprs_loss(yhat, y, cache, cfg);
    case LossFamily::kCombined: return combined_loss(yhat, y, cache, cfg);
    case LossFamily::kUtmosMargin:
      return utmos_margin_loss(yhat, y, cfg.gamma, cfg.p);
  }
  throw ValidationError("loss.family", "unhandled family");
}

double kink_distance(std::span<const double> yhat, std::span<const double> y,
                     const ComparisonCache &cache, const LossConfig &cfg) {
  check_inputs(yhat, y);
  double dist = std::numeric_limits<double>::infinity();
  const bool lambda_switches = cfg.lambda_c != 1.0;
  auto visit_pair = [&](double pred_diff, double true_diff, bool margin) {
    const double d = pred_diff - true_diff;
    if (margin) {
      dist = std::min(dist, std::abs(std::abs(d) - cfg.gamma));
      if (cfg.gamma == 0.0) dist = std::min(dist, std::abs(d));
    } else {
      dist = std::min(dist, std::abs(d));
      if (lambda_switches && true_diff != 0.0)
        dist = std::min(dist, std::abs(pred_diff));
    }
  };

  const std::size_t n = yhat.size();
  const bool rank_part =
      cfg.family == LossFamily::kPrs || cfg.family == LossFamily::kEprs ||
      cfg.family == LossFamily::kUtmosMargin ||
      (cfg.family == LossFamily::kCombined && cfg.alpha != 0.0);
  const bool margin = cfg.family == LossFamily::kUtmosMargin;
  if (rank_part) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        visit_pair(yhat[i] - yhat[j], y[i] - y[j], margin);
    if (cfg.uses_cache()) {
      for (std::size_t i = 0; i < n; ++i)
        for (const auto &c : cache.entries())
          visit_pair(yhat[i] - c.prediction, y[i] - c.target, false);
    }
  }
  const bool abs_part =
      cfg.family == LossFamily::kL1 ||
      (cfg.family == LossFamily::kCombined && cfg.beta != 0.0);
  if (abs_part) {
    for (std::size_t i = 0; i < n; ++i)
      dist = std::min(dist, std::abs(yhat[i] - y[i]));
  }
  return dist;
}

double loss_gradient_check(std::span<const double> yhat,
                           std::span<const double> y,
                           const ComparisonCache &cache, const LossConfig &cfg,
                           double epsilon) {
  if (!(epsilon > 0.0))
    throw ValidationError("epsilon", "must be positive");
  const double kink = kink_distance(yhat, y, cache, cfg);
  if (kink <= 10.0 * epsilon)
    throw KinkProximityError("a non-differentiable point lies within " +
                             std::to_string(kink) + " of the input");

  const LossResult analytic = evaluate_loss(yhat, y, cache, cfg);
  std::vector<double> probe(yhat.begin(), yhat.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + epsilon;
    const double up = evaluate_loss(probe, y, cache, cfg).value;
    probe[k] = saved - epsilon;
    const double down = evaluate_loss(probe, y, cache, cfg).value;
    probe[k] = saved;
    const double fd = (up - down) / (2.0 * epsilon);
    const double a = analytic.grad[k];
    const double rel =
        std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace prsmos
