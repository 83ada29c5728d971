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

// Experiment configuration and the command implementations behind the
// `otafl` tool.
//
// Config files hold one `key = value` pair per line; `#` starts a comment
// and lists are comma separated. Every key has a default (see
// config_schema()), except `model`, which must be given. Command-line
// overrides replace file values, which replace defaults.

#ifndef OTAFL_EXPERIMENT_HPP_
#define OTAFL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otafl/analysis.hpp"
#include "otafl/fl_core.hpp"

namespace otafl {

/// Version string embedded in every CSV header.
const char* version_string();

enum class ValueKind { kReal, kOptionalReal, kInteger, kString, kRealList, kChoice, kChoiceList };

struct ConfigKey {
  const char* name;
  ValueKind kind;
  const char* default_value;  // nullptr: required
  const char* choices;        // "|"-separated for kChoice / kChoiceList
  const char* help;
};

/// Every recognised key in documentation order.
std::span<const ConfigKey> config_schema();

/// Resolved key/value map. Values are kept as written after validation.
class ExperimentConfig {
 public:
  /// Defaults only; `model` is still missing.
  ExperimentConfig();

  /// Parses a config file. Throws ParseError with the line number on syntax
  /// errors, unknown keys or malformed values.
  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_string(const std::string& text);

  /// Replaces one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// "key=value" form of set().
  void apply_override(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;

  double real(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;

  /// Throws ConfigError naming the first missing or inconsistent field.
  void validate() const;

  /// Single line with every resolved key in schema order.
  std::string resolved() const;

  FLConfig fl_config() const;
  std::vector<Method> methods() const;
  /// Threshold configured for a method (mac_threshold / gnc_threshold).
  double threshold_for(Method m) const;
  /// Builds the federated problem for one seed: data, split and partition.
  Problem make_problem(std::uint64_t seed) const;

 private:
  void set_checked(const std::string& key, const std::string& value);
  std::map<std::string, std::string> values_;
};

/// Shortest round-trip decimal; "nan", "inf", "-inf" for special values.
std::string format_number(double v);

/// CSV file whose first line is "# <tool> <version> <command> <config>".
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command,
            const std::string& config_line, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  /// Writes the file; throws IoError on failure.
  void close();

 private:
  std::filesystem::path path_;
  std::size_t n_columns_;
  std::string buffer_;
};

struct TrainOutput {
  std::vector<std::filesystem::path> files;
  std::size_t diverged_methods = 0;
};

/// One per-round CSV per method plus <name>_summary.csv in output_dir.
TrainOutput cmd_train(const ExperimentConfig& cfg, std::ostream& log);

/// Best-threshold table <name>_sweep.csv over clip_grid and seeds.
std::filesystem::path cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

struct Lemma1Options {
  Lemma1Config config;
  std::filesystem::path output;
};

void cmd_lemma1(const Lemma1Options& opts, std::ostream& log);

struct Theorem1Options {
  QuadraticTestbedSpec testbed;
  FLConfig base;
  std::vector<std::size_t> k_grid{10, 100, 1000};
  std::size_t n_seeds = 20;
  std::vector<double> eta_grid;
  bool measure_p_c = false;
  std::filesystem::path output;
};

/// Throws RegimeError when eta is outside (0, 2/L).
void cmd_theorem1(const Theorem1Options& opts, std::ostream& log);

}  // namespace otafl

#endif  // OTAFL_EXPERIMENT_HPP_
