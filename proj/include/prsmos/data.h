// include/prsmos/data.h

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

#ifndef PRSMOS_DATA_H_
#define PRSMOS_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace prsmos {

// One audio sample: a precomputed embedding, the system that produced it and,
// when the sample is labeled, its mean opinion score.
struct DatasetRecord {
  std::string id;
  std::string system_id;
  std::vector<double> features;
  std::optional<double> mos;

  bool operator==(const DatasetRecord &) const = default;
};

// An ordered, validated collection of records. All records share one feature
// dimension, ids are unique and every present label is finite; the
// constructor throws DimensionError / DuplicateIdError / ValidationError
// otherwise.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::string name, std::vector<DatasetRecord> records = {});

  const std::string &name() const { return name_; }
  const std::vector<DatasetRecord> &records() const { return records_; }
  const DatasetRecord &operator[](std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  // Feature dimension; 0 for an empty dataset.
  std::size_t dim() const { return dim_; }

  Dataset labeled() const;
  Dataset unlabeled() const;
  bool fully_labeled() const;

  // Labels in record order. Throws ValidationError if any record is unlabeled.
  std::vector<double> labels() const;
  // n x d row-major view of the features.
  Eigen::MatrixXd feature_matrix() const;
  // Subset in the given index order.
  Dataset subset(const std::vector<std::size_t> &indices,
                 std::string name) const;

  bool operator==(const Dataset &other) const {
    return name_ == other.name_ && records_ == other.records_;
  }

 private:
  std::string name_;
  std::vector<DatasetRecord> records_;
  std::size_t dim_ = 0;
};

// Concatenates two datasets with matching dimension (ids must stay unique).
Dataset concat(const Dataset &a, const Dataset &b, std::string name);

enum class DataFormat { kJsonl, kCsv };

DataFormat format_from_path(const std::filesystem::path &path);

// JSONL: {"id": str, "system_id": str, "features": [num...], "mos": num|null}
// CSV:   header id,system_id,mos,f0,...,f{d-1}; empty mos cell = unlabeled.
Dataset load_dataset(const std::filesystem::path &path, DataFormat format);
Dataset load_dataset(const std::filesystem::path &path);

std::string serialize_dataset(const Dataset &ds, DataFormat format);
void save_dataset(const Dataset &ds, const std::filesystem::path &path,
                  DataFormat format);

struct SplitSpec {
  double train_fraction = 0.7;
  double dev_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t seed = 0;
  bool group_by_system = false;

  void validate() const;
};

struct DatasetSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
};

// Seeded partition. Counts are floor(fraction * N) with the remainder handed
// to train, dev, test in that order. With group_by_system the unit being
// partitioned is the system, so no system straddles two splits. Records keep
// their original relative order inside each split.
DatasetSplit split(const Dataset &ds, const SplitSpec &spec);

using SystemGroups = std::map<std::string, std::vector<std::size_t>>;

SystemGroups group_by_system(const Dataset &ds);

}  // namespace prsmos

#endif  // PRSMOS_DATA_H_
