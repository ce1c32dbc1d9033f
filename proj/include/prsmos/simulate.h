// include/prsmos/simulate.h

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

#ifndef PRSMOS_SIMULATE_H_
#define PRSMOS_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prsmos/data.h"
#include "prsmos/metrics.h"
#include "prsmos/model.h"
#include "prsmos/semisup.h"
#include "prsmos/train.h"

namespace prsmos {

// Synthetic listening test. Every system gets a true quality q_s ~ U[1, 5];
// each sample's latent quality is q_s plus Gaussian noise. Features embed the
// latent quality (coordinate 0 is affine in it, further informative
// coordinates mix in a quadratic term) alongside per-system nuisance factors
// and pure noise. Each label is the mean of R ratings
//   clip_round(3 + scale * (latent - 3) + shift_r + noise)
// where shift_r ~ N(listener_bias_shift, listener_shift_sd) per rater and
// clip_round rounds half away from zero and clips to 1..5.
struct SimConfig {
  std::size_t n_systems = 20;
  std::size_t samples_per_system = 20;
  std::size_t raters_per_sample = 8;
  std::size_t feature_dim = 16;
  double quality_noise_sd = 0.3;
  double feature_noise_sd = 0.3;
  double listener_bias_shift = 0.0;
  double listener_bias_scale = 1.0;
  double listener_shift_sd = 0.5;
  double rating_noise_sd = 0.5;
  // 0 = source domain. Larger values perturb the feature embedding (loadings
  // and offsets) drawn from embedding_seed, emulating an unseen test domain.
  double domain_shift = 0.0;
  std::uint64_t embedding_seed = 0;
  std::uint64_t seed = 0;
  std::string id_prefix;

  void validate() const;
};

Dataset simulate_dataset(const SimConfig &cfg);

// The true per-system qualities q_s drawn by simulate_dataset, keyed by
// system id.
std::vector<std::pair<std::string, double>> simulated_system_qualities(
    const SimConfig &cfg);

// Round half away from zero, then clip to [1, 5].
double clip_round(double v);

enum class DistortionKind { kShift, kAffine, kMonotoneCubic };
enum class DistortionTarget { kTruth, kPredictions };

// A strictly increasing map applied element-wise to labels or predictions.
// monotone_cubic is x + (x - 3)^3.
class DistortionSpec {
 public:
  static DistortionSpec shift(double c,
                              DistortionTarget target = DistortionTarget::kTruth);
  // Throws ValidationError unless a > 0.
  static DistortionSpec affine(double a, double b,
                               DistortionTarget target = DistortionTarget::kTruth);
  static DistortionSpec monotone_cubic(
      DistortionTarget target = DistortionTarget::kTruth);

  DistortionKind kind() const { return kind_; }
  DistortionTarget target() const { return target_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double operator()(double x) const;
  std::string describe() const;

 private:
  DistortionSpec(DistortionKind kind, double a, double b, DistortionTarget t)
      : kind_(kind), target_(t), a_(a), b_(b) {}
  DistortionKind kind_;
  DistortionTarget target_;
  double a_;
  double b_;
};

std::vector<double> distort(std::span<const double> values,
                            const DistortionSpec &spec);

struct DistortionReport {
  std::string distortion;
  MetricReport before;
  MetricReport after;
};

// Utterance-level metrics of the model on test, against the original and the
// distorted labels (or with distorted predictions).
DistortionReport run_distortion_experiment(const Regressor &model,
                                           const Dataset &test,
                                           const DistortionSpec &spec);

nlohmann::ordered_json to_json(const DistortionReport &r);

struct LossArm {
  std::string name;
  LossConfig loss;
};

struct ArmResult {
  std::string name;
  LevelReports test;
  TrainLog log;
};

struct ComparisonTable {
  std::vector<ArmResult> arms;
};

// Trains one model per arm on the same simulated data, split, initial
// weights and shuffles; reports test metrics at both levels.
ComparisonTable run_loss_comparison(const SimConfig &sim,
                                    const std::vector<LossArm> &arms,
                                    const TrainConfig &train_cfg,
                                    const ModelSpec &model_spec,
                                    const SplitSpec &split_spec);

// family,level,n,mse,lcc,srcc,ktau,status (one row per arm per level)
std::string comparison_csv(const ComparisonTable &table);
nlohmann::ordered_json comparison_json(const ComparisonTable &table);
// epoch,family,dev_srcc
std::string srcc_curves_csv(const ComparisonTable &table);

// Source-domain data for a pretrained model plus a shifted target domain split
// into a small labeled set, an unlabeled pool (true labels kept separately),
// dev and test.
struct OodScenarioConfig {
  SimConfig source;
  SimConfig target;  // usually source with domain_shift > 0, other biases
  std::size_t target_labeled = 20;
  double target_dev_fraction = 0.2;
  double target_test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct OodScenario {
  Dataset source_train;
  Dataset source_dev;
  Dataset target_labeled;
  Dataset target_unlabeled;       // labels stripped
  Dataset target_unlabeled_truth; // same records with their labels
  Dataset target_dev;
  Dataset target_test;
};

OodScenario simulate_ood_scenario(const OodScenarioConfig &cfg);

}  // namespace prsmos

#endif  // PRSMOS_SIMULATE_H_
