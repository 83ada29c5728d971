/*
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OTAFL_DATA_HPP_
#define OTAFL_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "otafl/types.hpp"

namespace otafl {

/// Labelled samples with a uniform feature dimension, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t feature_dim) : feature_dim_(feature_dim) {}

  void add(std::span<const double> x, int label);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t feature_dim() const { return feature_dim_; }
  /// max label + 1 (0 when empty).
  std::size_t n_classes() const;

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * feature_dim_, feature_dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  /// New dataset holding rows `idx`, in that order.
  Dataset subset(std::span<const std::size_t> idx) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t feature_dim_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
};

/// One client's local data. Quadratic models carry no samples; their data
/// lives in the model and is selected by client_id.
struct ClientDataset {
  std::size_t client_id = 0;
  Dataset data;
};

struct PartitionSpec {
  enum class Kind { kIid, kDirichlet };

  Kind kind = Kind::kIid;
  double concentration = 0.3;  // Dirichlet beta
  std::size_t n_clients = 1;
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_string() const;
};

/// Gaussian-mixture classes with unit-variance isotropic noise. Class means
/// are centred and pairwise `class_separation` apart (while classes fit in
/// the feature dimension). Labels are balanced and shuffled.
Dataset make_synthetic_classification(std::size_t n_samples, std::size_t feature_dim,
                                      std::size_t n_classes, double class_separation, Rng& rng);

/// Iid: random shuffle dealt into near-equal shares. Dirichlet(beta): one
/// Dir(beta * 1_N) draw per class, split by largest remainder; redrawn (up
/// to 1000 times) while any client would be empty.
std::vector<ClientDataset> partition(const Dataset& dataset, const PartitionSpec& spec);

/// Per-class proportions from one Dirichlet partition attempt, exposed for
/// tests: result[c][n] sums to 1 over n for every class c.
std::vector<std::vector<double>> dirichlet_class_proportions(std::size_t n_classes,
                                                             std::size_t n_clients,
                                                             double concentration, Rng& rng);

/// Random held-out split; returns (train, test).
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, double test_fraction,
                                             Rng& rng);

/// Numeric CSV with a header row. Every column other than `label_column`
/// is a feature. Throws ParseError naming the data row (1-based) and column.
Dataset load_csv_dataset(const std::string& path, const std::string& label_column);

}  // namespace otafl

#endif  // OTAFL_DATA_HPP_
