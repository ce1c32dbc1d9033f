// src/data.cc

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

#include "prsmos/data.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "prsmos/errors.h"
#include "prsmos/report.h"
#include "prsmos/rng.h"

namespace prsmos {

using nlohmann::json;

namespace {

void check_record(const DatasetRecord &r, std::size_t dim) {
  if (r.features.size() != dim) {
    throw DimensionError("record '" + r.id + "' has " +
                         std::to_string(r.features.size()) +
                         " features, expected " + std::to_string(dim));
  }
  for (double f : r.features) {
    if (!std::isfinite(f))
      throw ValidationError("features", "record '" + r.id +
                                            "' has a non-finite feature");
  }
  if (r.mos && !std::isfinite(*r.mos))
    throw ValidationError("mos", "record '" + r.id + "' has a non-finite mos");
}

std::vector<std::string> split_csv_line(const std::string &line,
                                        std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == '"')
      throw ParseError(line_no, "quoted CSV fields are not supported");
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

double parse_number(const std::string &s, std::size_t line_no,
                    const std::string &what) {
  double v = 0.0;
  const char *first = s.data();
  const char *last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line_no, "cannot parse " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

DatasetRecord parse_jsonl_line(const std::string &line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
  for (const char *key : {"id", "system_id", "features", "mos"}) {
    if (!j.contains(key))
      throw ParseError(line_no, std::string("missing field '") + key + "'");
  }
  if (!j["id"].is_string() || !j["system_id"].is_string())
    throw ParseError(line_no, "'id' and 'system_id' must be strings");
  if (!j["features"].is_array() || j["features"].empty())
    throw ParseError(line_no, "'features' must be a non-empty array");

  DatasetRecord r;
  r.id = j["id"].get<std::string>();
  r.system_id = j["system_id"].get<std::string>();
  r.features.reserve(j["features"].size());
  for (const auto &f : j["features"]) {
    if (!f.is_number())
      throw ParseError(line_no, "'features' must contain only numbers");
    r.features.push_back(f.get<double>());
  }
  if (j["mos"].is_number()) {
    r.mos = j["mos"].get<double>();
  } else if (!j["mos"].is_null()) {
    throw ParseError(line_no, "'mos' must be a number or null");
  }
  return r;
}

Dataset load_jsonl(const std::filesystem::path &path) {
  std::vector<DatasetRecord> records;
  std::size_t line_no = 0;
  std::optional<std::size_t> dim;
  std::unordered_set<std::string> ids;
  for (const auto &line : read_lines(path)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    DatasetRecord r = parse_jsonl_line(line, line_no);
    if (!dim) dim = r.features.size();
    check_record(r, *dim);
    if (!ids.insert(r.id).second)
      throw DuplicateIdError("duplicate id '" + r.id + "' on line " +
                             std::to_string(line_no));
    records.push_back(std::move(r));
  }
  return Dataset(path.stem().string(), std::move(records));
}

Dataset load_csv(const std::filesystem::path &path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(1, "missing CSV header");
  auto header = split_csv_line(lines[0], 1);
  if (header.size() < 4 || header[0] != "id" || header[1] != "system_id" ||
      header[2] != "mos")
    throw ParseError(1, "header must start with id,system_id,mos,f0");
  const std::size_t dim = header.size() - 3;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[3 + k] != "f" + std::to_string(k))
      throw ParseError(1, "feature column " + std::to_string(k) +
                              " must be named f" + std::to_string(k));
  }

  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    auto cells = split_csv_line(lines[i], line_no);
    if (cells.size() < 3)
      throw ParseError(line_no, "expected at least id,system_id,mos");
    DatasetRecord r;
    r.id = cells[0];
    r.system_id = cells[1];
    if (!cells[2].empty()) r.mos = parse_number(cells[2], line_no, "mos");
    for (std::size_t k = 3; k < cells.size(); ++k)
      r.features.push_back(parse_number(cells[k], line_no, "feature"));
    check_record(r, dim);
    if (!ids.insert(r.id).second)
      throw DuplicateIdError("duplicate id '" + r.id + "' on line " +
                             std::to_string(line_no));
    records.push_back(std::move(r));
  }
  return Dataset(path.stem().string(), std::move(records));
}

}  // namespace

Dataset::Dataset(std::string name, std::vector<DatasetRecord> records)
    : name_(std::move(name)), records_(std::move(records)) {
  if (records_.empty()) return;
  dim_ = records_.front().features.size();
  if (dim_ == 0)
    throw DimensionError("record '" + records_.front().id +
                         "' has an empty feature vector");
  std::unordered_set<std::string> ids;
  ids.reserve(records_.size());
  for (const auto &r : records_) {
    check_record(r, dim_);
    if (!ids.insert(r.id).second)
      throw DuplicateIdError("duplicate id '" + r.id + "'");
  }
}

Dataset Dataset::labeled() const {
  std::vector<DatasetRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [](const DatasetRecord &r) { return r.mos.has_value(); });
  return Dataset(name_ + ".labeled", std::move(out));
}

Dataset Dataset::unlabeled() const {
  std::vector<DatasetRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [](const DatasetRecord &r) { return !r.mos.has_value(); });
  return Dataset(name_ + ".unlabeled", std::move(out));
}

bool Dataset::fully_labeled() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const DatasetRecord &r) { return r.mos.has_value(); });
}

std::vector<double> Dataset::labels() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto &r : records_) {
    if (!r.mos)
      throw ValidationError("mos", "record '" + r.id + "' in '" + name_ +
                                       "' is unlabeled");
    out.push_back(*r.mos);
  }
  return out;
}

Eigen::MatrixXd Dataset::feature_matrix() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records_.size()),
                    static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < records_.size(); ++i)
    for (std::size_t k = 0; k < dim_; ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          records_[i].features[k];
  return x;
}

Dataset Dataset::subset(const std::vector<std::size_t> &indices,
                        std::string name) const {
  std::vector<DatasetRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(records_.at(i));
  return Dataset(std::move(name), std::move(out));
}

Dataset concat(const Dataset &a, const Dataset &b, std::string name) {
  std::vector<DatasetRecord> out = a.records();
  out.insert(out.end(), b.records().begin(), b.records().end());
  return Dataset(std::move(name), std::move(out));
}

DataFormat format_from_path(const std::filesystem::path &path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return DataFormat::kJsonl;
  if (ext == ".csv") return DataFormat::kCsv;
  throw ValidationError("format", "cannot infer dataset format from '" +
                                      path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path &path, DataFormat format) {
  return format == DataFormat::kJsonl ? load_jsonl(path) : load_csv(path);
}

Dataset load_dataset(const std::filesystem::path &path) {
  return load_dataset(path, format_from_path(path));
}

std::string serialize_dataset(const Dataset &ds, DataFormat format) {
  std::ostringstream out;
  if (format == DataFormat::kJsonl) {
    for (const auto &r : ds.records()) {
      nlohmann::ordered_json j;
      j["id"] = r.id;
      j["system_id"] = r.system_id;
      j["features"] = r.features;
      j["mos"] = r.mos ? json(*r.mos) : json(nullptr);
      out << j.dump() << '\n';
    }
    return out.str();
  }

  out << "id,system_id,mos";
  for (std::size_t k = 0; k < ds.dim(); ++k) out << ",f" << k;
  out << '\n';
  for (const auto &r : ds.records()) {
    for (const auto *s : {&r.id, &r.system_id}) {
      if (s->find_first_of(",\"\n") != std::string::npos)
        throw ValidationError("id", "'" + *s + "' cannot be written as CSV");
    }
    out << r.id << ',' << r.system_id << ',';
    if (r.mos) out << format_double(*r.mos);
    for (double f : r.features) out << ',' << format_double(f);
    out << '\n';
  }
  return out.str();
}

void save_dataset(const Dataset &ds, const std::filesystem::path &path,
                  DataFormat format) {
  write_text_file(path, serialize_dataset(ds, format));
}

void SplitSpec::validate() const {
  for (auto [name, f] : {std::pair{"train_fraction", train_fraction},
                         std::pair{"dev_fraction", dev_fraction},
                         std::pair{"test_fraction", test_fraction}}) {
    if (!(f >= 0.0 && f <= 1.0))
      throw ValidationError(std::string("split.") + name, "must be in [0, 1]");
  }
  if (std::abs(train_fraction + dev_fraction + test_fraction - 1.0) > 1e-9)
    throw ValidationError("split", "fractions must sum to 1");
}

namespace {

std::array<std::size_t, 3> split_counts(std::size_t total,
                                        const SplitSpec &spec) {
  const std::array<double, 3> f = {spec.train_fraction, spec.dev_fraction,
                                   spec.test_fraction};
  std::array<std::size_t, 3> counts{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    // The small slack keeps e.g. 0.29 * 100 from flooring to 28.
    counts[k] = static_cast<std::size_t>(
        std::floor(f[k] * static_cast<double>(total) + 1e-9));
    assigned += counts[k];
  }
  std::size_t remainder = total - std::min(total, assigned);
  while (remainder > 0) {
    bool gave = false;
    for (int k = 0; k < 3 && remainder > 0; ++k) {
      if (f[k] > 0.0) {
        ++counts[k];
        --remainder;
        gave = true;
      }
    }
    if (!gave) break;
  }
  return counts;
}

}  // namespace

DatasetSplit split(const Dataset &ds, const SplitSpec &spec) {
  spec.validate();
  if (ds.empty()) throw EmptySplitError("cannot split an empty dataset");

  Rng rng = make_rng(spec.seed, "split");
  std::array<std::vector<std::size_t>, 3> parts;

  if (spec.group_by_system) {
    const auto groups = group_by_system(ds);
    std::vector<std::string> systems;
    for (const auto &[sys, _] : groups) systems.push_back(sys);
    std::shuffle(systems.begin(), systems.end(), rng);
    const auto counts = split_counts(systems.size(), spec);
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < counts[k]; ++c, ++pos) {
        const auto &idx = groups.at(systems[pos]);
        parts[k].insert(parts[k].end(), idx.begin(), idx.end());
      }
    }
  } else {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto counts = split_counts(ds.size(), spec);
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      parts[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                      order.begin() +
                          static_cast<std::ptrdiff_t>(pos + counts[k]));
      pos += counts[k];
    }
  }

  const std::array<double, 3> f = {spec.train_fraction, spec.dev_fraction,
                                   spec.test_fraction};
  const std::array<const char *, 3> names = {"train", "dev", "test"};
  for (int k = 0; k < 3; ++k) {
    if (f[k] > 0.0 && parts[k].empty())
      throw EmptySplitError(std::string(names[k]) + " split with fraction " +
                            format_double(f[k]) + " received no records");
    std::sort(parts[k].begin(), parts[k].end());
  }
  return DatasetSplit{ds.subset(parts[0], ds.name() + ".train"),
                      ds.subset(parts[1], ds.name() + ".dev"),
                      ds.subset(parts[2], ds.name() + ".test")};
}

SystemGroups group_by_system(const Dataset &ds) {
  SystemGroups groups;
  for (std::size_t i = 0; i < ds.size(); ++i)
    groups[ds[i].system_id].push_back(i);
  return groups;
}

}  // namespace prsmos
