// src/metrics.cc

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

#include "prsmos/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prsmos/errors.h"

namespace prsmos {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b,
                   std::size_t min_n) {
  if (a.size() != b.size())
    throw DimensionError("length mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  if (a.size() < min_n)
    throw UndefinedMetricError("need at least " + std::to_string(min_n) +
                               " points, got " + std::to_string(a.size()));
}

double pearson(std::span<const double> a, std::span<const double> b,
               const char *what) {
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    throw UndefinedMetricError(std::string(what) + " undefined: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw DimensionError("mse needs equal, non-zero lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - truth[i];
    s += r * r;
  }
  return s / static_cast<double>(pred.size());
}

double lcc(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth, 2);
  return pearson(pred, truth, "lcc");
}

std::vector<double> fractional_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank mean(i+1..j)
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double srcc(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth, 2);
  const auto rp = fractional_ranks(pred);
  const auto rt = fractional_ranks(truth);
  return pearson(rp, rt, "srcc");
}

double ktau(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth, 2);
  const std::size_t n = pred.size();
  // Counts are exact integers; long long keeps n up to ~3e9 pairs safe.
  long long concordant = 0, discordant = 0, ties_pred = 0, ties_truth = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = pred[i] - pred[j];
      const double dt = truth[i] - truth[j];
      if (pred[i] == pred[j]) ++ties_pred;
      if (truth[i] == truth[j]) ++ties_truth;
      if (pred[i] == pred[j] || truth[i] == truth[j]) continue;
      if ((dp > 0) == (dt > 0))
        ++concordant;
      else
        ++discordant;
    }
  }
  const long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  const double denom = std::sqrt(static_cast<double>(n0 - ties_pred) *
                                 static_cast<double>(n0 - ties_truth));
  if (denom == 0.0) throw UndefinedMetricError("ktau undefined: all ties");
  return static_cast<double>(concordant - discordant) / denom;
}

std::string_view to_string(MetricLevel level) {
  return level == MetricLevel::kUtterance ? "utterance" : "system";
}

MetricReport evaluate(std::span<const double> pred,
                      std::span<const double> truth, MetricLevel level) {
  MetricReport r;
  r.level = level;
  r.n = pred.size();
  r.mse = mse(pred, truth);
  auto guarded = [&](auto fn) -> std::optional<double> {
    try {
      return fn(pred, truth);
    } catch (const UndefinedMetricError &) {
      return std::nullopt;
    }
  };
  r.lcc = guarded(lcc);
  r.srcc = guarded(srcc);
  r.ktau = guarded(ktau);
  return r;
}

SystemMeans system_level(std::span<const double> pred,
                         std::span<const double> truth,
                         const SystemGroups &groups) {
  if (pred.size() != truth.size())
    throw DimensionError("system_level: prediction/label length mismatch");
  SystemMeans out;
  std::size_t covered = 0;
  for (const auto &[system, indices] : groups) {
    if (indices.empty())
      throw ValidationError("groups", "system '" + system + "' is empty");
    double sp = 0.0, st = 0.0;
    for (std::size_t i : indices) {
      if (i >= pred.size())
        throw DimensionError("system '" + system + "' indexes past the end");
      sp += pred[i];
      st += truth[i];
    }
    const double k = static_cast<double>(indices.size());
    out.systems.push_back(system);
    out.pred.push_back(sp / k);
    out.truth.push_back(st / k);
    covered += indices.size();
  }
  if (covered != pred.size())
    throw ValidationError("groups", "groups do not cover every index exactly once");
  return out;
}

LevelReports evaluate_levels(std::span<const double> pred, const Dataset &ds) {
  const auto truth = ds.labels();
  const auto sys = system_level(pred, truth, group_by_system(ds));
  return LevelReports{evaluate(pred, truth, MetricLevel::kUtterance),
                      evaluate(sys.pred, sys.truth, MetricLevel::kSystem)};
}

nlohmann::ordered_json to_json(const MetricReport &report) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double> &v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json j;
  j["level"] = std::string(to_string(report.level));
  j["n"] = report.n;
  j["mse"] = report.mse;
  j["lcc"] = opt(report.lcc);
  j["srcc"] = opt(report.srcc);
  j["ktau"] = opt(report.ktau);
  j["status"] = report.ok() ? "ok" : "undefined";
  return j;
}

}  // namespace prsmos
