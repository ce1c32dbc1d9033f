// src/run_config.cc

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

#include "prsmos/run_config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "prsmos/errors.h"
#include "prsmos/report.h"
#include "prsmos/rng.h"

namespace prsmos {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string &field, const std::string &v) {
  double out = 0.0;
  const std::string t = trim(v);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError(field, "expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string &field, const std::string &v) {
  std::uint64_t out = 0;
  const std::string t = trim(v);
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError(field, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string &field, const std::string &v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ValidationError(field, "expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string &v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig &, const std::string &field,
                                  const std::string &value)>;

// section -> key -> setter. The empty section holds top-level keys.
const std::map<std::string, std::map<std::string, Setter>> &schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"",
       {{"seed", [](RunConfig &c, auto &f, auto &v) { c.seed = to_uint(f, v); }},
        {"out", [](RunConfig &c, auto &, auto &v) { c.out_dir = trim(v); }}}},
      {"data",
       {{"train", [](RunConfig &c, auto &, auto &v) { c.data_train = trim(v); }},
        {"dev", [](RunConfig &c, auto &, auto &v) { c.data_dev = trim(v); }},
        {"test", [](RunConfig &c, auto &, auto &v) { c.data_test = trim(v); }},
        {"dataset", [](RunConfig &c, auto &, auto &v) { c.data_dataset = trim(v); }},
        {"labeled", [](RunConfig &c, auto &, auto &v) { c.data_labeled = trim(v); }},
        {"unlabeled",
         [](RunConfig &c, auto &, auto &v) { c.data_unlabeled = trim(v); }}}},
      {"split",
       {{"train_fraction",
         [](RunConfig &c, auto &f, auto &v) { c.split.train_fraction = to_double(f, v); }},
        {"dev_fraction",
         [](RunConfig &c, auto &f, auto &v) { c.split.dev_fraction = to_double(f, v); }},
        {"test_fraction",
         [](RunConfig &c, auto &f, auto &v) { c.split.test_fraction = to_double(f, v); }},
        {"group_by_system",
         [](RunConfig &c, auto &f, auto &v) { c.split.group_by_system = to_bool(f, v); }}}},
      {"model",
       {{"architecture",
         [](RunConfig &c, auto &, auto &v) {
           c.model.architecture = architecture_from_string(trim(v));
         }},
        {"hidden",
         [](RunConfig &c, auto &f, auto &v) {
           c.model.hidden.clear();
           for (const auto &s : to_list(v)) c.model.hidden.push_back(to_uint(f, s));
         }},
        {"activation",
         [](RunConfig &c, auto &, auto &v) {
           c.model.activation = activation_from_string(trim(v));
         }},
        {"start_checkpoint",
         [](RunConfig &c, auto &, auto &v) { c.start_checkpoint = trim(v); }}}},
      {"loss",
       {{"family",
         [](RunConfig &c, auto &, auto &v) {
           c.train.loss.family = loss_family_from_string(trim(v));
         }},
        {"p", [](RunConfig &c, auto &f, auto &v) { c.train.loss.p = to_double(f, v); }},
        {"lambda_c",
         [](RunConfig &c, auto &f, auto &v) { c.train.loss.lambda_c = to_double(f, v); }},
        {"alpha",
         [](RunConfig &c, auto &f, auto &v) { c.train.loss.alpha = to_double(f, v); }},
        {"beta",
         [](RunConfig &c, auto &f, auto &v) { c.train.loss.beta = to_double(f, v); }},
        {"gamma",
         [](RunConfig &c, auto &f, auto &v) { c.train.loss.gamma = to_double(f, v); }},
        {"cache_capacity",
         [](RunConfig &c, auto &f, auto &v) {
           if (trim(v).empty() || trim(v) == "auto")
             c.train.loss.cache_capacity.reset();
           else
             c.train.loss.cache_capacity = to_uint(f, v);
         }},
        {"cache_scale",
         [](RunConfig &c, auto &f, auto &v) {
           c.train.loss.cache_scale = to_double(f, v);
         }}}},
      {"train",
       {{"batch_size",
         [](RunConfig &c, auto &f, auto &v) { c.train.batch_size = to_uint(f, v); }},
        {"epochs", [](RunConfig &c, auto &f, auto &v) { c.train.epochs = to_uint(f, v); }},
        {"learning_rate",
         [](RunConfig &c, auto &f, auto &v) { c.train.learning_rate = to_double(f, v); }},
        {"optimizer",
         [](RunConfig &c, auto &, auto &v) {
           c.train.optimizer = optimizer_from_string(trim(v));
         }},
        {"adam_beta1",
         [](RunConfig &c, auto &f, auto &v) { c.train.adam_beta1 = to_double(f, v); }},
        {"adam_beta2",
         [](RunConfig &c, auto &f, auto &v) { c.train.adam_beta2 = to_double(f, v); }},
        {"adam_eps",
         [](RunConfig &c, auto &f, auto &v) { c.train.adam_eps = to_double(f, v); }},
        {"patience",
         [](RunConfig &c, auto &f, auto &v) { c.train.patience = to_uint(f, v); }},
        {"shuffle", [](RunConfig &c, auto &f, auto &v) { c.train.shuffle = to_bool(f, v); }},
        {"weight_decay",
         [](RunConfig &c, auto &f, auto &v) { c.train.weight_decay = to_double(f, v); }},
        {"dropout",
         [](RunConfig &c, auto &f, auto &v) { c.train.dropout = to_double(f, v); }}}},
      {"semisup",
       {{"rounds_max",
         [](RunConfig &c, auto &f, auto &v) { c.rounds_max = to_uint(f, v); }},
        {"selection",
         [](RunConfig &c, auto &f, auto &v) {
           const auto t = trim(v);
           if (t == "all")
             c.selection = SelectionKind::kAll;
           else if (t == "bapmos")
             c.selection = SelectionKind::kBapmos;
           else
             throw ValidationError(f, "expected all or bapmos, got '" + t + "'");
         }},
        {"regenerate",
         [](RunConfig &c, auto &f, auto &v) { c.regenerate = to_bool(f, v); }}}},
      {"bapmos",
       {{"bins", [](RunConfig &c, auto &f, auto &v) { c.bapmos.bins = to_uint(f, v); }},
        {"range",
         [](RunConfig &c, auto &f, auto &v) {
           const auto t = trim(v);
           if (t == "data_min_max")
             c.bapmos.range_policy = RangePolicy::kDataMinMax;
           else if (t == "fixed")
             c.bapmos.range_policy = RangePolicy::kFixed;
           else
             throw ValidationError(f, "expected data_min_max or fixed, got '" + t + "'");
         }},
        {"range_lo",
         [](RunConfig &c, auto &f, auto &v) { c.bapmos.range_lo = to_double(f, v); }},
        {"range_hi",
         [](RunConfig &c, auto &f, auto &v) { c.bapmos.range_hi = to_double(f, v); }}}},
      {"sim",
       {{"n_systems",
         [](RunConfig &c, auto &f, auto &v) { c.sim.n_systems = to_uint(f, v); }},
        {"samples_per_system",
         [](RunConfig &c, auto &f, auto &v) { c.sim.samples_per_system = to_uint(f, v); }},
        {"raters_per_sample",
         [](RunConfig &c, auto &f, auto &v) { c.sim.raters_per_sample = to_uint(f, v); }},
        {"feature_dim",
         [](RunConfig &c, auto &f, auto &v) { c.sim.feature_dim = to_uint(f, v); }},
        {"quality_noise_sd",
         [](RunConfig &c, auto &f, auto &v) { c.sim.quality_noise_sd = to_double(f, v); }},
        {"feature_noise_sd",
         [](RunConfig &c, auto &f, auto &v) { c.sim.feature_noise_sd = to_double(f, v); }},
        {"listener_bias_shift",
         [](RunConfig &c, auto &f, auto &v) { c.sim.listener_bias_shift = to_double(f, v); }},
        {"listener_bias_scale",
         [](RunConfig &c, auto &f, auto &v) { c.sim.listener_bias_scale = to_double(f, v); }},
        {"listener_shift_sd",
         [](RunConfig &c, auto &f, auto &v) { c.sim.listener_shift_sd = to_double(f, v); }},
        {"rating_noise_sd",
         [](RunConfig &c, auto &f, auto &v) { c.sim.rating_noise_sd = to_double(f, v); }},
        {"domain_shift",
         [](RunConfig &c, auto &f, auto &v) { c.sim.domain_shift = to_double(f, v); }},
        {"embedding_seed",
         [](RunConfig &c, auto &f, auto &v) { c.sim.embedding_seed = to_uint(f, v); }},
        {"id_prefix", [](RunConfig &c, auto &, auto &v) { c.sim.id_prefix = trim(v); }}}},
      {"simulate",
       {{"mode",
         [](RunConfig &c, auto &f, auto &v) {
           const auto t = trim(v);
           if (t == "generate")
             c.simulate_mode = SimulateMode::kGenerate;
           else if (t == "distortion")
             c.simulate_mode = SimulateMode::kDistortion;
           else if (t == "comparison")
             c.simulate_mode = SimulateMode::kComparison;
           else
             throw ValidationError(f, "expected generate, distortion or comparison");
         }},
        {"distortion",
         [](RunConfig &c, auto &, auto &v) { c.distortion = trim(v); }},
        {"distortion_target",
         [](RunConfig &c, auto &f, auto &v) {
           const auto t = trim(v);
           if (t == "truth")
             c.distortion_target = DistortionTarget::kTruth;
           else if (t == "predictions")
             c.distortion_target = DistortionTarget::kPredictions;
           else
             throw ValidationError(f, "expected truth or predictions");
         }},
        {"families",
         [](RunConfig &c, auto &, auto &v) {
           c.families.clear();
           for (const auto &s : to_list(v))
             c.families.push_back(loss_family_from_string(s));
         }}}},
  };
  return table;
}

std::string_view mode_name(SimulateMode m) {
  switch (m) {
    case SimulateMode::kGenerate: return "generate";
    case SimulateMode::kDistortion: return "distortion";
    case SimulateMode::kComparison: return "comparison";
  }
  return "?";
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t global_seed) {
  seed = global_seed;
  split.seed = substream_seed(seed, "split");
  model.seed = substream_seed(seed, "init");
  train.seed = substream_seed(seed, "shuffle");
  bapmos.seed = substream_seed(seed, "bapmos");
  sim.seed = substream_seed(seed, "sim");
}

void RunConfig::validate() const {
  train.validate();
  bapmos.validate();
  sim.validate();
  split.validate();
  if (rounds_max == 0)
    throw ValidationError("semisup.rounds_max", "must be positive");
  if (model.architecture == Architecture::kMlp && model.hidden.empty())
    throw ValidationError("model.hidden", "an mlp needs at least one hidden layer");
  for (std::size_t h : model.hidden) {
    if (h == 0) throw ValidationError("model.hidden", "sizes must be positive");
  }
  parse_distortion(distortion, distortion_target);
}

RunConfig parse_run_config(const std::string &text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ParseError(e.line(), e.message());
  }

  RunConfig cfg;
  const auto &table = schema();
  for (const auto &[name, node] : tree) {
    if (node.empty()) {
      const auto &top = table.at("");
      auto it = top.find(name);
      if (it == top.end()) {
        if (table.count(name))  // an empty [section]
          continue;
        throw ValidationError(name, "unknown key");
      }
      it->second(cfg, name, node.data());
      continue;
    }
    auto sec = table.find(name);
    if (sec == table.end() || name.empty())
      throw ValidationError(name, "unknown section");
    for (const auto &[key, leaf] : node) {
      const std::string field = name + "." + key;
      auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ValidationError(field, "unknown key");
      it->second(cfg, field, leaf.data());
    }
  }
  cfg.apply_seed(cfg.seed);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string to_ini(const RunConfig &c) {
  std::ostringstream o;
  auto list = [](const auto &items, auto fn) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ",";
      s += fn(items[i]);
    }
    return s;
  };
  const auto &l = c.train.loss;
  const auto &t = c.train;
  o << "seed = " << c.seed << "\n"
    << "out = " << c.out_dir << "\n\n"
    << "[data]\n"
    << "train = " << c.data_train << "\n"
    << "dev = " << c.data_dev << "\n"
    << "test = " << c.data_test << "\n"
    << "dataset = " << c.data_dataset << "\n"
    << "labeled = " << c.data_labeled << "\n"
    << "unlabeled = " << c.data_unlabeled << "\n\n"
    << "[split]\n"
    << "train_fraction = " << format_double(c.split.train_fraction) << "\n"
    << "dev_fraction = " << format_double(c.split.dev_fraction) << "\n"
    << "test_fraction = " << format_double(c.split.test_fraction) << "\n"
    << "group_by_system = " << (c.split.group_by_system ? "true" : "false")
    << "\n\n"
    << "[model]\n"
    << "architecture = " << to_string(c.model.architecture) << "\n"
    << "hidden = "
    << list(c.model.hidden, [](std::size_t h) { return std::to_string(h); })
    << "\n"
    << "activation = " << to_string(c.model.activation) << "\n"
    << "start_checkpoint = " << c.start_checkpoint << "\n\n"
    << "[loss]\n"
    << "family = " << to_string(l.family) << "\n"
    << "p = " << format_double(l.p) << "\n"
    << "lambda_c = " << format_double(l.lambda_c) << "\n"
    << "alpha = " << format_double(l.alpha) << "\n"
    << "beta = " << format_double(l.beta) << "\n"
    << "gamma = " << format_double(l.gamma) << "\n"
    << "cache_capacity = " << c.train.resolved_cache_capacity() << "\n"
    << "cache_scale = " << format_double(l.cache_scale) << "\n\n"
    << "[train]\n"
    << "batch_size = " << t.batch_size << "\n"
    << "epochs = " << t.epochs << "\n"
    << "learning_rate = " << format_double(t.learning_rate) << "\n"
    << "optimizer = " << to_string(t.optimizer) << "\n"
    << "adam_beta1 = " << format_double(t.adam_beta1) << "\n"
    << "adam_beta2 = " << format_double(t.adam_beta2) << "\n"
    << "adam_eps = " << format_double(t.adam_eps) << "\n"
    << "patience = " << t.patience << "\n"
    << "shuffle = " << (t.shuffle ? "true" : "false") << "\n"
    << "weight_decay = " << format_double(t.weight_decay) << "\n"
    << "dropout = " << format_double(t.dropout) << "\n\n"
    << "[semisup]\n"
    << "rounds_max = " << c.rounds_max << "\n"
    << "selection = " << (c.selection == SelectionKind::kAll ? "all" : "bapmos")
    << "\n"
    << "regenerate = " << (c.regenerate ? "true" : "false") << "\n\n"
    << "[bapmos]\n"
    << "bins = " << c.bapmos.bins << "\n"
    << "range = "
    << (c.bapmos.range_policy == RangePolicy::kFixed ? "fixed" : "data_min_max")
    << "\n"
    << "range_lo = " << format_double(c.bapmos.range_lo) << "\n"
    << "range_hi = " << format_double(c.bapmos.range_hi) << "\n\n"
    << "[sim]\n"
    << "n_systems = " << c.sim.n_systems << "\n"
    << "samples_per_system = " << c.sim.samples_per_system << "\n"
    << "raters_per_sample = " << c.sim.raters_per_sample << "\n"
    << "feature_dim = " << c.sim.feature_dim << "\n"
    << "quality_noise_sd = " << format_double(c.sim.quality_noise_sd) << "\n"
    << "feature_noise_sd = " << format_double(c.sim.feature_noise_sd) << "\n"
    << "listener_bias_shift = " << format_double(c.sim.listener_bias_shift) << "\n"
    << "listener_bias_scale = " << format_double(c.sim.listener_bias_scale) << "\n"
    << "listener_shift_sd = " << format_double(c.sim.listener_shift_sd) << "\n"
    << "rating_noise_sd = " << format_double(c.sim.rating_noise_sd) << "\n"
    << "domain_shift = " << format_double(c.sim.domain_shift) << "\n"
    << "embedding_seed = " << c.sim.embedding_seed << "\n"
    << "id_prefix = " << c.sim.id_prefix << "\n\n"
    << "[simulate]\n"
    << "mode = " << mode_name(c.simulate_mode) << "\n"
    << "distortion = " << c.distortion << "\n"
    << "distortion_target = "
    << (c.distortion_target == DistortionTarget::kTruth ? "truth" : "predictions")
    << "\n"
    << "families = "
    << list(c.families, [](LossFamily f) { return std::string(to_string(f)); })
    << "\n";
  return o.str();
}

DistortionSpec parse_distortion(const std::string &text,
                                DistortionTarget target) {
  const std::string t = trim(text);
  if (t == "monotone_cubic") return DistortionSpec::monotone_cubic(target);
  auto args = [&](const std::string &prefix) {
    if (t.rfind(prefix + "(", 0) != 0 || t.back() != ')')
      throw ValidationError("simulate.distortion", "cannot parse '" + t + "'");
    return to_list(t.substr(prefix.size() + 1, t.size() - prefix.size() - 2));
  };
  if (t.rfind("shift", 0) == 0) {
    auto a = args("shift");
    if (a.size() != 1)
      throw ValidationError("simulate.distortion", "shift takes one argument");
    return DistortionSpec::shift(to_double("simulate.distortion", a[0]), target);
  }
  if (t.rfind("affine", 0) == 0) {
    auto a = args("affine");
    if (a.size() != 2)
      throw ValidationError("simulate.distortion", "affine takes two arguments");
    return DistortionSpec::affine(to_double("simulate.distortion", a[0]),
                                  to_double("simulate.distortion", a[1]), target);
  }
  throw ValidationError("simulate.distortion", "unknown distortion '" + t + "'");
}

}  // namespace prsmos
