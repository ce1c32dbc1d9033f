// include/prsmos/metrics.h

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

#ifndef PRSMOS_METRICS_H_
#define PRSMOS_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prsmos/data.h"

namespace prsmos {

// Mean squared error. Throws DimensionError on length mismatch or empty input.
double mse(std::span<const double> pred, std::span<const double> truth);

// Pearson correlation. Throws UndefinedMetricError when either side has zero
// variance or fewer than 2 points.
double lcc(std::span<const double> pred, std::span<const double> truth);

// 1-based ranks with ties sharing the average of the positions they span.
std::vector<double> fractional_ranks(std::span<const double> v);

// Spearman: Pearson correlation of fractional ranks.
double srcc(std::span<const double> pred, std::span<const double> truth);

// Kendall tau-b, O(n^2) pair counting.
double ktau(std::span<const double> pred, std::span<const double> truth);

enum class MetricLevel { kUtterance, kSystem };

std::string_view to_string(MetricLevel level);

struct MetricReport {
  MetricLevel level = MetricLevel::kUtterance;
  std::size_t n = 0;
  double mse = 0.0;
  // Empty when the correlation is undefined for this input.
  std::optional<double> lcc;
  std::optional<double> srcc;
  std::optional<double> ktau;

  bool ok() const { return lcc && srcc && ktau; }
};

// Computes all four metrics; undefined correlations become empty optionals.
MetricReport evaluate(std::span<const double> pred,
                      std::span<const double> truth, MetricLevel level);

struct SystemMeans {
  std::vector<std::string> systems;  // sorted
  std::vector<double> pred;
  std::vector<double> truth;
};

// Per-system means of predictions and labels, in sorted system order.
SystemMeans system_level(std::span<const double> pred,
                         std::span<const double> truth,
                         const SystemGroups &groups);

struct LevelReports {
  MetricReport utterance;
  MetricReport system;
};

// Utterance- and system-level reports of predictions against ds labels.
LevelReports evaluate_levels(std::span<const double> pred, const Dataset &ds);

// {"level","n","mse","lcc","srcc","ktau","status"}; undefined values are null
// and status is "undefined" ("ok" otherwise).
nlohmann::ordered_json to_json(const MetricReport &report);

}  // namespace prsmos

#endif  // PRSMOS_METRICS_H_
