// include/prsmos/model.h

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

#ifndef PRSMOS_MODEL_H_
#define PRSMOS_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "prsmos/data.h"

namespace prsmos {

enum class Architecture { kLinear, kMlp };
enum class Activation { kRelu, kTanh };

std::string_view to_string(Architecture a);
std::string_view to_string(Activation a);
Architecture architecture_from_string(std::string_view s);
Activation activation_from_string(std::string_view s);

// Affine map out = W * in + b; W is (out x in).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

// Feature vector -> scalar MOS estimate. A linear model is a single dense
// layer [d, 1]; an MLP stacks dense layers with the hidden activation between
// them. The output is unbounded.
class Regressor {
 public:
  Regressor(Architecture arch, std::vector<std::size_t> layer_sizes,
            Activation activation = Activation::kRelu);

  Architecture architecture() const { return arch_; }
  Activation activation() const { return activation_; }
  const std::vector<std::size_t> &layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }

  const std::vector<DenseLayer> &layers() const { return layers_; }
  // Mutable access bumps the version, invalidating outstanding traces.
  std::vector<DenseLayer> &mutable_layers() {
    ++version_;
    return layers_;
  }
  std::uint64_t version() const { return version_; }

  std::size_t parameter_count() const;
  // Layer by layer: weights (row-major), then bias.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> params);

 private:
  Architecture arch_;
  Activation activation_;
  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
  std::uint64_t version_ = 0;
};

// He-style init: weights ~ N(0, 1) * sqrt(2 / fan_in), biases 0.
// layer_sizes runs from the input dimension to the output 1.
Regressor init_regressor(Architecture arch, std::vector<std::size_t> layer_sizes,
                         std::uint64_t seed,
                         Activation activation = Activation::kRelu);

// Activations kept by forward() for backward(). inputs[l] is the input to
// layer l; pre[l] its pre-activation. Columns are samples.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> dropout_masks;  // empty when dropout is off
  std::uint64_t model_version = 0;
  std::size_t batch_size = 0;
};

struct ForwardResult {
  std::vector<double> predictions;
  ForwardTrace trace;
};

// batch is n x d (one sample per row).
ForwardResult forward(const Regressor &model, const Eigen::MatrixXd &batch);

// Training-mode forward with inverted dropout on hidden activations.
ForwardResult forward_train(const Regressor &model, const Eigen::MatrixXd &batch,
                            double dropout, std::mt19937_64 &rng);

using Gradients = std::vector<DenseLayer>;

// Parameter gradients of sum_i loss_grad[i] * yhat_i. Throws StaleTraceError
// if the model changed since the trace was taken.
Gradients backward(const Regressor &model, const ForwardTrace &trace,
                   std::span<const double> loss_grad);

std::vector<double> flatten(const Gradients &grads);

// Predictions for every record (labels are ignored), index-aligned.
std::vector<double> predict(const Regressor &model, const Dataset &ds);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(Regressor &model, const Gradients &grads) = 0;
};

class SgdOptimizer : public Optimizer {
 public:
  explicit SgdOptimizer(double lr) : lr_(lr) {}
  void step(Regressor &model, const Gradients &grads) override;

 private:
  double lr_;
};

class AdamOptimizer : public Optimizer {
 public:
  AdamOptimizer(double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(Regressor &model, const Gradients &grads) override;

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  Gradients m_, v_;
};

struct Checkpoint {
  Regressor model;
  std::uint64_t seed = 0;
};

// JSON container, see docs in README ("Checkpoint format").
void save_checkpoint(const std::filesystem::path &path, const Regressor &model,
                     std::uint64_t seed);
Checkpoint load_checkpoint(const std::filesystem::path &path);
std::string checkpoint_to_string(const Regressor &model, std::uint64_t seed);
Checkpoint checkpoint_from_string(const std::string &text);

}  // namespace prsmos

#endif  // PRSMOS_MODEL_H_
