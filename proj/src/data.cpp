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

#include "otafl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "otafl/errors.hpp"

namespace otafl {

void Dataset::add(std::span<const double> x, int label) {
  if (x.size() != feature_dim_) {
    throw StructureError("Dataset::add: feature dimension " + std::to_string(x.size()) +
                         " differs from " + std::to_string(feature_dim_));
  }
  if (label < 0) throw DomainError("Dataset::add: labels must be non-negative");
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

std::size_t Dataset::n_classes() const {
  if (labels_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels_.begin(), labels_.end())) + 1;
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out(feature_dim_);
  out.features_.reserve(idx.size() * feature_dim_);
  out.labels_.reserve(idx.size());
  for (std::size_t i : idx) out.add(features(i), labels_.at(i));
  return out;
}

void PartitionSpec::validate() const {
  if (n_clients == 0) throw DomainError("partition: n_clients must be >= 1");
  if (kind == Kind::kDirichlet && !(concentration > 0.0)) {
    throw DomainError("partition: Dirichlet concentration must be > 0");
  }
}

std::string PartitionSpec::to_string() const {
  if (kind == Kind::kIid) return "iid";
  std::ostringstream os;
  os << "dirichlet:" << concentration;
  return os.str();
}

Dataset make_synthetic_classification(std::size_t n_samples, std::size_t feature_dim,
                                      std::size_t n_classes, double class_separation, Rng& rng) {
  if (n_samples == 0 || feature_dim == 0 || n_classes == 0) {
    throw DomainError("make_synthetic_classification: sizes must be positive");
  }
  if (!(class_separation >= 0.0)) {
    throw DomainError("make_synthetic_classification: separation must be >= 0");
  }
  std::normal_distribution<double> normal(0.0, 1.0);

  // Scaled one-hot means are pairwise `class_separation` apart; classes
  // beyond the feature dimension get random directions of the same norm.
  const double radius = class_separation / std::sqrt(2.0);
  std::vector<std::vector<double>> means(n_classes, std::vector<double>(feature_dim, 0.0));
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (c < feature_dim) {
      means[c][c] = radius;
    } else {
      double nrm = 0.0;
      for (double& v : means[c]) {
        v = normal(rng);
        nrm += v * v;
      }
      nrm = std::sqrt(nrm);
      for (double& v : means[c]) v *= radius / nrm;
    }
  }
  std::vector<double> centre(feature_dim, 0.0);
  for (const auto& m : means) axpy(1.0 / static_cast<double>(n_classes), m, centre);
  for (auto& m : means) axpy(-1.0, centre, m);

  std::vector<int> labels(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) labels[i] = static_cast<int>(i % n_classes);
  std::shuffle(labels.begin(), labels.end(), rng);

  Dataset out(feature_dim);
  std::vector<double> x(feature_dim);
  for (int y : labels) {
    const auto& m = means[static_cast<std::size_t>(y)];
    for (std::size_t j = 0; j < feature_dim; ++j) x[j] = m[j] + normal(rng);
    out.add(x, y);
  }
  return out;
}

std::vector<std::vector<double>> dirichlet_class_proportions(std::size_t n_classes,
                                                             std::size_t n_clients,
                                                             double concentration, Rng& rng) {
  if (!(concentration > 0.0)) throw DomainError("Dirichlet concentration must be > 0");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<std::vector<double>> props(n_classes, std::vector<double>(n_clients));
  for (auto& p : props) {
    double total = 0.0;
    for (double& v : p) {
      v = gamma(rng);
      total += v;
    }
    if (total > 0.0) {
      for (double& v : p) v /= total;
    } else {
      // Every gamma draw underflowed (tiny beta): put the mass on one client.
      std::uniform_int_distribution<std::size_t> pick(0, n_clients - 1);
      p[pick(rng)] = 1.0;
    }
  }
  return props;
}

namespace {

// Largest-remainder rounding of `count * props` to integers summing to count.
std::vector<std::size_t> largest_remainder(std::size_t count, const std::vector<double>& props) {
  const std::size_t n = props.size();
  std::vector<std::size_t> out(n);
  std::vector<std::pair<double, std::size_t>> rem(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = props[i] * static_cast<double>(count);
    out[i] = static_cast<std::size_t>(std::floor(exact));
    rem[i] = {exact - static_cast<double>(out[i]), i};
    assigned += out[i];
  }
  // Ties go to the lower client index so the result is deterministic.
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++out[rem[k % n].second];
  while (assigned > count) {
    // Only reachable through rounding noise in the proportions.
    auto it = std::max_element(out.begin(), out.end());
    --*it;
    --assigned;
  }
  return out;
}

}  // namespace

std::vector<ClientDataset> partition(const Dataset& dataset, const PartitionSpec& spec) {
  spec.validate();
  if (spec.n_clients > dataset.size()) {
    throw DomainError("partition: " + std::to_string(spec.n_clients) + " clients but only " +
                      std::to_string(dataset.size()) + " samples");
  }
  Rng rng(derive_seed(spec.seed, Stream::kPartition));
  std::vector<std::vector<std::size_t>> assignment(spec.n_clients);

  if (spec.kind == PartitionSpec::Kind::kIid) {
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
      assignment[i % spec.n_clients].push_back(order[i]);
    }
  } else {
    const std::size_t n_classes = dataset.n_classes();
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      by_class[static_cast<std::size_t>(dataset.label(i))].push_back(i);
    }
    constexpr int kMaxAttempts = 1000;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      for (auto& a : assignment) a.clear();
      auto props = dirichlet_class_proportions(n_classes, spec.n_clients, spec.concentration, rng);
      for (std::size_t c = 0; c < n_classes; ++c) {
        auto members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        const auto counts = largest_remainder(members.size(), props[c]);
        std::size_t offset = 0;
        for (std::size_t n = 0; n < spec.n_clients; ++n) {
          for (std::size_t k = 0; k < counts[n]; ++k) assignment[n].push_back(members[offset++]);
        }
      }
      ok = std::none_of(assignment.begin(), assignment.end(),
                        [](const auto& a) { return a.empty(); });
    }
    if (!ok) {
      throw DomainError("partition: Dirichlet split left a client empty after " +
                        std::to_string(kMaxAttempts) + " attempts");
    }
  }

  std::vector<ClientDataset> clients(spec.n_clients);
  for (std::size_t n = 0; n < spec.n_clients; ++n) {
    std::sort(assignment[n].begin(), assignment[n].end());
    clients[n].client_id = n;
    clients[n].data = dataset.subset(assignment[n]);
  }
  return clients;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, double test_fraction,
                                             Rng& rng) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw DomainError("split_train_test: test fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(dataset.size())));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {dataset.subset(train), dataset.subset(test)};
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("CSV file '" + path + "' has no rows", 0);

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw ParseError("CSV header has no label column \"" + label_column + "\"", line_no,
                     label_column);
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  Dataset out(header.size() - 1);
  std::vector<double> x(header.size() - 1);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                           "): expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    int label = 0;
    std::size_t f = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      auto fail = [&](const char* what) {
        throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                             "), column \"" + header[c] + "\": " + what + " '" + cell + "'",
                         line_no, header[c]);
      };
      if (c == label_idx) {
        auto [ptr, ec] = std::from_chars(first, last, label);
        if (ec != std::errc() || ptr != last || cell.empty()) fail("label is not an integer");
        if (label < 0) fail("label must be non-negative");
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || cell.empty() || !std::isfinite(v)) {
          fail("not a number");
        }
        x[f++] = v;
      }
    }
    out.add(x, label);
  }
  if (out.empty()) throw ParseError("CSV file '" + path + "' has no rows", line_no);
  return out;
}

}  // namespace otafl
