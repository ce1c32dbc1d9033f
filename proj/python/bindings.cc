// python/bindings.cc

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

// Python bindings for the prsmos core. Sequences of floats map to
// std::vector<double>; every library error surfaces as prsmos.Error with the
// machine-readable kind in its `kind` attribute.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prsmos/commands.h"
#include "prsmos/data.h"
#include "prsmos/errors.h"
#include "prsmos/metrics.h"
#include "prsmos/rankloss.h"
#include "prsmos/semisup.h"
#include "prsmos/simulate.h"

namespace py = pybind11;
using namespace prsmos;

namespace {

LossConfig make_loss(const std::string &family, double p, double lambda_c,
                     double alpha, double beta, double gamma,
                     double cache_scale) {
  LossConfig cfg;
  cfg.family = loss_family_from_string(family);
  cfg.p = p;
  cfg.lambda_c = lambda_c;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.gamma = gamma;
  cfg.cache_scale = cache_scale;
  cfg.validate();
  return cfg;
}

ComparisonCache make_cache(const std::vector<double> &pred,
                           const std::vector<double> &target) {
  ComparisonCache cache(pred.size());
  cache.push(pred, target);
  return cache;
}

py::tuple result(const LossResult &r) { return py::make_tuple(r.value, r.grad); }

py::dict report_dict(const MetricReport &r) {
  py::dict d;
  d["level"] = std::string(to_string(r.level));
  d["n"] = r.n;
  d["mse"] = r.mse;
  d["lcc"] = r.lcc;
  d["srcc"] = r.srcc;
  d["ktau"] = r.ktau;
  d["status"] = r.ok() ? "ok" : "undefined";
  return d;
}

py::dict record_dict(const DatasetRecord &r) {
  py::dict d;
  d["id"] = r.id;
  d["system_id"] = r.system_id;
  d["features"] = r.features;
  d["mos"] = r.mos;
  return d;
}

py::list dataset_list(const Dataset &ds) {
  py::list out;
  for (const auto &r : ds.records()) out.append(record_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rank-similarity losses, metrics and experiments for MOS prediction";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object inst =
          py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      inst.attr("kind") = py::str(e.kind());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("partial_rank_matrix",
        [](const std::vector<double> &scores) {
          const PartialRankMatrix pr = partial_rank_matrix(scores);
          std::vector<std::vector<double>> rows(pr.size(),
                                                std::vector<double>(pr.size()));
          for (std::size_t i = 0; i < pr.size(); ++i)
            for (std::size_t j = 0; j < pr.size(); ++j) rows[i][j] = pr(i, j);
          return rows;
        },
        py::arg("scores"));

  m.def("loss",
        [](const std::vector<double> &yhat, const std::vector<double> &y,
           const std::string &family, double p, double lambda_c, double alpha,
           double beta, double gamma, double cache_scale,
           const std::vector<double> &cache_pred,
           const std::vector<double> &cache_target) {
          const LossConfig cfg =
              make_loss(family, p, lambda_c, alpha, beta, gamma, cache_scale);
          return result(
              evaluate_loss(yhat, y, make_cache(cache_pred, cache_target), cfg));
        },
        "Loss value and gradient with respect to yhat.", py::arg("yhat"),
        py::arg("y"), py::arg("family") = "PRS", py::arg("p") = 1.0,
        py::arg("lambda_c") = 1.0, py::arg("alpha") = 1.0,
        py::arg("beta") = 0.0, py::arg("gamma") = 0.0,
        py::arg("cache_scale") = 0.1,
        py::arg("cache_pred") = std::vector<double>{},
        py::arg("cache_target") = std::vector<double>{});

  m.def("mse", [](const std::vector<double> &a, const std::vector<double> &b) {
    return mse(a, b);
  });
  m.def("lcc", [](const std::vector<double> &a, const std::vector<double> &b) {
    return lcc(a, b);
  });
  m.def("srcc", [](const std::vector<double> &a, const std::vector<double> &b) {
    return srcc(a, b);
  });
  m.def("ktau", [](const std::vector<double> &a, const std::vector<double> &b) {
    return ktau(a, b);
  });
  m.def("evaluate",
        [](const std::vector<double> &pred, const std::vector<double> &truth) {
          return report_dict(evaluate(pred, truth, MetricLevel::kUtterance));
        },
        py::arg("pred"), py::arg("truth"));

  m.def("load_dataset",
        [](const std::filesystem::path &path) {
          return dataset_list(load_dataset(path));
        },
        py::arg("path"));

  m.def("simulate_dataset",
        [](std::size_t n_systems, std::size_t samples_per_system,
           std::size_t feature_dim, std::uint64_t seed) {
          SimConfig cfg;
          cfg.n_systems = n_systems;
          cfg.samples_per_system = samples_per_system;
          cfg.feature_dim = feature_dim;
          cfg.seed = seed;
          return dataset_list(simulate_dataset(cfg));
        },
        py::arg("n_systems") = 20, py::arg("samples_per_system") = 20,
        py::arg("feature_dim") = 16, py::arg("seed") = 0);

  m.def("bapmos_select",
        [](const std::vector<double> &pseudo_mos, std::size_t bins,
           std::uint64_t seed) {
          PseudoLabelPool pool;
          pool.records.resize(pseudo_mos.size());
          pool.pseudo_mos = pseudo_mos;
          BApMOSConfig cfg;
          cfg.bins = bins;
          cfg.seed = seed;
          return bapmos_select(pool, cfg);
        },
        "Indices chosen by balanced pseudo-label selection.",
        py::arg("pseudo_mos"), py::arg("bins") = 10, py::arg("seed") = 0);

  auto overrides = [](std::optional<std::string> out,
                      std::optional<std::uint64_t> seed) {
    CliOverrides ov;
    if (out) ov.out = *out;
    ov.seed = seed;
    return ov;
  };
  m.def("train",
        [overrides](const std::string &config, std::optional<std::string> out,
                    std::optional<std::uint64_t> seed) {
          cmd_train(prepare_config(config, overrides(out, seed)));
        },
        py::arg("config"), py::arg("out") = py::none(),
        py::arg("seed") = py::none());
  m.def("semisup",
        [overrides](const std::string &config, std::optional<std::string> out,
                    std::optional<std::uint64_t> seed) {
          cmd_semisup(prepare_config(config, overrides(out, seed)));
        },
        py::arg("config"), py::arg("out") = py::none(),
        py::arg("seed") = py::none());
  m.def("simulate",
        [overrides](const std::string &config, std::optional<std::string> out,
                    std::optional<std::uint64_t> seed) {
          cmd_simulate(prepare_config(config, overrides(out, seed)));
        },
        py::arg("config"), py::arg("out") = py::none(),
        py::arg("seed") = py::none());
  m.def("eval",
        [](const std::filesystem::path &checkpoint,
           const std::filesystem::path &data, const std::filesystem::path &out) {
          cmd_eval(checkpoint, data, out);
        },
        py::arg("checkpoint"), py::arg("data"), py::arg("out"));
}
