// include/prsmos/rankloss.h

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

#ifndef PRSMOS_RANKLOSS_H_
#define PRSMOS_RANKLOSS_H_

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prsmos {

// Antisymmetric matrix of all pairwise differences of a score vector:
// entry (i, j) = l[i] - l[j]. Stored row-major.
class PartialRankMatrix {
 public:
  explicit PartialRankMatrix(std::span<const double> scores);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  const std::vector<double> &entries() const { return entries_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

// Throws ValidationError on empty or non-finite input.
PartialRankMatrix partial_rank_matrix(std::span<const double> scores);

enum class LossFamily { kL1, kPrs, kEprs, kCombined, kUtmosMargin };

std::string_view to_string(LossFamily family);
LossFamily loss_family_from_string(std::string_view name);

struct LossConfig {
  LossFamily family = LossFamily::kPrs;
  double p = 1.0;
  // Weight of pairs whose predicted and true differences agree in sign.
  double lambda_c = 1.0;
  double alpha = 1.0;  // rank term weight (combined)
  double beta = 0.0;   // L1 term weight (combined)
  double gamma = 0.0;  // margin (UTMOS-style baseline only)
  // Unset means 4 x batch size, resolved by the trainer.
  std::optional<std::size_t> cache_capacity;
  // Weight of the batch x cache comparison block.
  double cache_scale = 0.1;

  void validate() const;
  // True for every family built on pairwise differences.
  bool is_rank_family() const { return family != LossFamily::kL1; }
  bool uses_cache() const {
    return family == LossFamily::kEprs || family == LossFamily::kCombined;
  }
};

struct LossResult {
  double value = 0.0;
  std::vector<double> grad;  // d value / d yhat_i
};

// FIFO store of (prediction, target) pairs from earlier batches. Cached
// predictions are plain numbers: no gradient reaches them and they are never
// refreshed after insertion.
class ComparisonCache {
 public:
  struct Entry {
    double prediction;
    double target;
  };

  explicit ComparisonCache(std::size_t capacity = 0) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<Entry> &entries() const { return entries_; }

  // Appends the pairs in order, evicting the oldest beyond capacity.
  void push(std::span<const double> yhat, std::span<const double> y);
  void clear() { entries_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

// Functional form of ComparisonCache::push.
ComparisonCache cache_push(ComparisonCache cache, std::span<const double> yhat,
                           std::span<const double> y);

// (sum_ij lambda_ij |PR_ij(yhat) - PR_ij(y)|^p)^(1/p), lambda_ij = 1 when
// PR_ij(yhat) * PR_ij(y) <= 0 and cfg.lambda_c otherwise. Needs n >= 2.
LossResult prs_loss(std::span<const double> yhat, std::span<const double> y,
                    const LossConfig &cfg);

// prs_loss with an extra n x |cache| block of comparisons against cached
// pairs, weighted by cfg.cache_scale inside the outer root. Does not touch
// the cache.
LossResult eprs_loss(std::span<const double> yhat, std::span<const double> y,
                     const ComparisonCache &cache, const LossConfig &cfg);

// (sum_i |yhat_i - y_i|^p)^(1/p)
LossResult l1_loss(std::span<const double> yhat, std::span<const double> y,
                   double p);

// alpha * eprs_loss + beta * l1_loss
LossResult combined_loss(std::span<const double> yhat,
                         std::span<const double> y,
                         const ComparisonCache &cache, const LossConfig &cfg);

// (sum_ij max(0, |PR_ij(yhat) - PR_ij(y)| - gamma)^p)^(1/p). Zero inside the
// margin even when the pair is ordered the wrong way round.
LossResult utmos_margin_loss(std::span<const double> yhat,
                             std::span<const double> y, double gamma,
                             double p);

// Dispatches on cfg.family. The cache is only read by kEprs / kCombined.
LossResult evaluate_loss(std::span<const double> yhat,
                         std::span<const double> y,
                         const ComparisonCache &cache, const LossConfig &cfg);

// Smallest distance of yhat to a point where the selected loss is not
// differentiable: a zero residual difference, a sign flip of a predicted
// pairwise difference (where lambda switches), a margin boundary, or a zero
// total for p != 1.
double kink_distance(std::span<const double> yhat, std::span<const double> y,
                     const ComparisonCache &cache, const LossConfig &cfg);

// Compares the analytic gradient of evaluate_loss with central finite
// differences of step epsilon and returns the largest component-wise
// relative error |a - f| / max(1, |a|, |f|). Throws KinkProximityError if a
// kink lies within 10 * epsilon of yhat.
double loss_gradient_check(std::span<const double> yhat,
                           std::span<const double> y,
                           const ComparisonCache &cache, const LossConfig &cfg,
                           double epsilon = 1e-6);

}  // namespace prsmos

#endif  // PRSMOS_RANKLOSS_H_
