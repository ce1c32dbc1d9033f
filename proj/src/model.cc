// src/model.cc

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

#include "prsmos/model.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prsmos/errors.h"
#include "prsmos/report.h"
#include "prsmos/rng.h"

namespace prsmos {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr const char *kCheckpointFormat = "prsmos.checkpoint";
constexpr int kCheckpointVersion = 1;

MatrixXd activate(const MatrixXd &pre, Activation act) {
  if (act == Activation::kRelu) return pre.cwiseMax(0.0);
  return pre.array().tanh().matrix();
}

MatrixXd activate_derivative(const MatrixXd &pre, Activation act) {
  if (act == Activation::kRelu)
    return (pre.array() > 0.0).cast<double>().matrix();
  const auto t = pre.array().tanh();
  return (1.0 - t * t).matrix();
}

ForwardResult run_forward(const Regressor &model, const MatrixXd &batch,
                          double dropout, std::mt19937_64 *rng) {
  if (static_cast<std::size_t>(batch.cols()) != model.input_dim())
    throw DimensionError("model expects " + std::to_string(model.input_dim()) +
                         " features, batch has " +
                         std::to_string(batch.cols()));
  const auto &layers = model.layers();
  ForwardResult out;
  out.trace.model_version = model.version();
  out.trace.batch_size = static_cast<std::size_t>(batch.rows());

  MatrixXd current = batch.transpose();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    MatrixXd pre = layers[l].weights * current;
    pre.colwise() += layers[l].bias;
    out.trace.inputs.push_back(std::move(current));
    if (l + 1 == layers.size()) {
      out.predictions.assign(pre.data(), pre.data() + pre.size());
      out.trace.pre.push_back(std::move(pre));
      break;
    }
    current = activate(pre, model.activation());
    if (dropout > 0.0) {
      std::bernoulli_distribution keep(1.0 - dropout);
      MatrixXd mask(current.rows(), current.cols());
      for (Index c = 0; c < mask.cols(); ++c)
        for (Index r = 0; r < mask.rows(); ++r)
          mask(r, c) = keep(*rng) ? 1.0 / (1.0 - dropout) : 0.0;
      current = current.cwiseProduct(mask);
      out.trace.dropout_masks.push_back(std::move(mask));
    }
    out.trace.pre.push_back(std::move(pre));
  }
  return out;
}

}  // namespace

std::string_view to_string(Architecture a) {
  return a == Architecture::kLinear ? "linear" : "mlp";
}

std::string_view to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Architecture architecture_from_string(std::string_view s) {
  if (s == "linear") return Architecture::kLinear;
  if (s == "mlp") return Architecture::kMlp;
  throw ValidationError("model.architecture",
                        "expected linear or mlp, got '" + std::string(s) + "'");
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw ValidationError("model.activation",
                        "expected relu or tanh, got '" + std::string(s) + "'");
}

Regressor::Regressor(Architecture arch, std::vector<std::size_t> layer_sizes,
                     Activation activation)
    : arch_(arch), activation_(activation), sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw ValidationError("model.layer_sizes", "need at least [d, 1]");
  if (sizes_.back() != 1)
    throw ValidationError("model.layer_sizes", "output dimension must be 1");
  for (std::size_t s : sizes_) {
    if (s == 0)
      throw ValidationError("model.layer_sizes", "sizes must be positive");
  }
  if (arch_ == Architecture::kLinear && sizes_.size() != 2)
    throw ValidationError("model.layer_sizes",
                          "a linear model has exactly [d, 1]");
  if (arch_ == Architecture::kMlp && sizes_.size() < 3)
    throw ValidationError("model.layer_sizes",
                          "an mlp needs at least one hidden layer");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back(DenseLayer{
        MatrixXd::Zero(static_cast<Index>(sizes_[l + 1]),
                       static_cast<Index>(sizes_[l])),
        VectorXd::Zero(static_cast<Index>(sizes_[l + 1]))});
  }
}

std::size_t Regressor::parameter_count() const {
  std::size_t n = 0;
  for (const auto &layer : layers_)
    n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  return n;
}

std::vector<double> Regressor::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto &layer : layers_) {
    for (Index r = 0; r < layer.weights.rows(); ++r)
      for (Index c = 0; c < layer.weights.cols(); ++c)
        out.push_back(layer.weights(r, c));
    for (Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias(r));
  }
  return out;
}

void Regressor::set_flat_parameters(std::span<const double> params) {
  if (params.size() != parameter_count())
    throw DimensionError("expected " + std::to_string(parameter_count()) +
                         " parameters, got " + std::to_string(params.size()));
  std::size_t k = 0;
  for (auto &layer : mutable_layers()) {
    for (Index r = 0; r < layer.weights.rows(); ++r)
      for (Index c = 0; c < layer.weights.cols(); ++c)
        layer.weights(r, c) = params[k++];
    for (Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = params[k++];
  }
}

Regressor init_regressor(Architecture arch, std::vector<std::size_t> layer_sizes,
                         std::uint64_t seed, Activation activation) {
  Regressor model(arch, std::move(layer_sizes), activation);
  Rng rng = make_rng(seed, "init");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto &layer : model.mutable_layers()) {
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.weights.cols()));
    for (Index r = 0; r < layer.weights.rows(); ++r)
      for (Index c = 0; c < layer.weights.cols(); ++c)
        layer.weights(r, c) = normal(rng) * scale;
    layer.bias.setZero();
  }
  return model;
}

ForwardResult forward(const Regressor &model, const MatrixXd &batch) {
  return run_forward(model, batch, 0.0, nullptr);
}

ForwardResult forward_train(const Regressor &model, const MatrixXd &batch,
                            double dropout, std::mt19937_64 &rng) {
  return run_forward(model, batch, dropout, &rng);
}

Gradients backward(const Regressor &model, const ForwardTrace &trace,
                   std::span<const double> loss_grad) {
  if (trace.model_version != model.version() ||
      trace.pre.size() != model.layers().size())
    throw StaleTraceError("trace was taken from a different model state");
  if (loss_grad.size() != trace.batch_size)
    throw DimensionError("loss gradient has " +
                         std::to_string(loss_grad.size()) +
                         " entries, batch had " +
                         std::to_string(trace.batch_size));

  const auto &layers = model.layers();
  Gradients grads(layers.size());
  MatrixXd delta(1, static_cast<Index>(loss_grad.size()));
  for (std::size_t i = 0; i < loss_grad.size(); ++i)
    delta(0, static_cast<Index>(i)) = loss_grad[i];

  for (std::size_t l = layers.size(); l-- > 0;) {
    grads[l].weights = delta * trace.inputs[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd back = layers[l].weights.transpose() * delta;
    back = back.cwiseProduct(activate_derivative(trace.pre[l - 1],
                                                 model.activation()));
    if (!trace.dropout_masks.empty())
      back = back.cwiseProduct(trace.dropout_masks[l - 1]);
    delta = std::move(back);
  }
  return grads;
}

std::vector<double> flatten(const Gradients &grads) {
  std::vector<double> out;
  for (const auto &layer : grads) {
    for (Index r = 0; r < layer.weights.rows(); ++r)
      for (Index c = 0; c < layer.weights.cols(); ++c)
        out.push_back(layer.weights(r, c));
    for (Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias(r));
  }
  return out;
}

std::vector<double> predict(const Regressor &model, const Dataset &ds) {
  if (ds.empty()) return {};
  if (ds.dim() != model.input_dim())
    throw DimensionError("model expects " + std::to_string(model.input_dim()) +
                         " features, dataset '" + ds.name() + "' has " +
                         std::to_string(ds.dim()));
  return forward(model, ds.feature_matrix()).predictions;
}

void SgdOptimizer::step(Regressor &model, const Gradients &grads) {
  auto &layers = model.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weights -= lr_ * grads[l].weights;
    layers[l].bias -= lr_ * grads[l].bias;
  }
}

void AdamOptimizer::step(Regressor &model, const Gradients &grads) {
  auto &layers = model.mutable_layers();
  if (m_.empty()) {
    for (const auto &g : grads) {
      m_.push_back(DenseLayer{MatrixXd::Zero(g.weights.rows(), g.weights.cols()),
                              VectorXd::Zero(g.bias.size())});
    }
    v_ = m_;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, m_[l].weights, v_[l].weights, grads[l].weights);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grads[l].bias);
  }
}

std::string checkpoint_to_string(const Regressor &model, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["architecture"] = std::string(to_string(model.architecture()));
  j["activation"] = std::string(to_string(model.activation()));
  j["layer_sizes"] = model.layer_sizes();
  j["seed"] = seed;
  j["parameters"] = model.flat_parameters();
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(1, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw ValidationError("checkpoint.format", "not a prsmos checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ValidationError("checkpoint.version", "unsupported version");
    Regressor model(
        architecture_from_string(j.at("architecture").get<std::string>()),
        j.at("layer_sizes").get<std::vector<std::size_t>>(),
        activation_from_string(j.at("activation").get<std::string>()));
    model.set_flat_parameters(j.at("parameters").get<std::vector<double>>());
    return Checkpoint{std::move(model), j.at("seed").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError("checkpoint", e.what());
  }
}

void save_checkpoint(const std::filesystem::path &path, const Regressor &model,
                     std::uint64_t seed) {
  write_text_file(path, checkpoint_to_string(model, seed));
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace prsmos
