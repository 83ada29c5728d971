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

// Synchronous over-the-air federated training loop. Each round:
//
//   1. broadcast w_k to all N clients
//   2. every client runs E local epochs and returns its pseudo-gradient
//   3. the channel superimposes the faded pseudo-gradients and adds SaS noise
//   4. the server clips the received vector block by block
//   5. w_{k+1} = w_k - eta * clipped
//
// All randomness derives from FLConfig::seed. Batch order is drawn from a
// stream keyed by (round, client) and channel randomness from one keyed by
// round, so the streams never interfere.

#ifndef OTAFL_FL_CORE_HPP_
#define OTAFL_FL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/clipping.hpp"
#include "otafl/data.hpp"
#include "otafl/models.hpp"
#include "otafl/types.hpp"

namespace otafl {

struct FLConfig {
  std::size_t n_clients = 50;
  std::size_t rounds = 200;
  double learning_rate = 0.03;  // eta
  std::size_t local_epochs = 5;
  std::size_t batch_size = 10;  // 0 = full local batch
  double local_lr = 0.0;        // 0 = same as eta
  ClipMethod clip = ClipMethod::none();
  ChannelConfig channel{};
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  std::optional<double> projection_radius;  // project w onto |w| <= r after each update
  double divergence_factor = 1e6;

  double effective_local_lr() const { return local_lr > 0.0 ? local_lr : learning_rate; }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  std::string to_string() const;
};

/// Throws RegimeError unless eta <= 2 / L and C > sqrt(2) G (MAC only).
void check_theorem_regime(const FLConfig& cfg, const SmoothnessInfo& info);

/// Model plus federated data. For Quadratic models the clients carry only
/// their ids.
struct Problem {
  ModelSpec model;
  std::vector<ClientDataset> clients;
  std::optional<Dataset> test;  // held-out split for accuracy
};

struct RoundRecord {
  std::size_t round = 0;
  double global_loss = 0.0;   // f(w_k), before this round's update
  double grad_norm_sq = 0.0;  // |grad f(w_k)|^2
  std::optional<double> snr_db;
  std::vector<double> clipped_fraction;  // per block, in [0, 1]
  double update_norm = 0.0;              // |w_{k+1} - w_k|
  std::optional<double> eval_accuracy;   // on the held-out set at w_k
  double median_mean_gap = 0.0;          // med(received) - mean(signal)
  double wall_time = 0.0;                // seconds
  bool diverged = false;

  /// Entry-weighted clipped fraction over all blocks.
  double overall_clipped_fraction(const BlockLayout& layout) const;
};

struct FLState {
  ParamVector w;
  std::size_t round = 0;
  double initial_loss = 0.0;
};

/// Starting state: initial_parameters drawn from the init stream unless `w0`
/// is given.
FLState initial_state(const Problem& problem, const FLConfig& cfg,
                      std::optional<ParamVector> w0 = std::nullopt);

/// Executes one round in place. Returns its record. A non-finite aggregate
/// or update, or a loss beyond divergence_factor * max(|f(w_0)|, 1), marks
/// the record diverged and leaves state.w untouched.
RoundRecord run_round(FLState& state, const Problem& problem, const FLConfig& cfg);

struct EvalResult {
  double loss = 0.0;
  std::optional<double> accuracy;
};

/// Mean cross-entropy and 0-1 accuracy on a labelled set.
EvalResult evaluate(const ModelSpec& spec, std::span<const double> w, const Dataset& held_out);
/// Held-out evaluation when the problem has a test set, otherwise the
/// federated objective with no accuracy.
EvalResult evaluate(const Problem& problem, std::span<const double> w);

struct RunResult {
  std::vector<RoundRecord> records;  // stops at the diverged round
  ParamVector final_w;
  double initial_loss = 0.0;
  EvalResult final_eval;
  bool diverged = false;
  std::string diagnostic;  // why the run stopped early
};

RunResult run_training(const Problem& problem, const FLConfig& cfg,
                       std::optional<ParamVector> w0 = std::nullopt);

/// Method set compared in experiments. kIdeal is the noiseless, fading-free
/// channel with no clipping.
enum class Method { kMac, kGnc, kNone, kIdeal };

std::string to_string(Method m);
/// Throws ConfigError for names outside {mac, gnc, none, ideal}.
Method parse_method(const std::string& name);
/// `base` with the clip and channel fields set for method `m` at threshold C.
FLConfig config_for_method(const FLConfig& base, Method m, double threshold);

using ProblemFactory = std::function<Problem(std::uint64_t seed)>;

struct SweepRow {
  Method method = Method::kMac;
  double threshold = 0.0;
  double median_accuracy = 0.0;  // NaN for models without accuracy
  double median_loss = 0.0;
  std::size_t diverged_runs = 0;
  bool best = false;
};

/// Runs every (method, C, seed) triple; seeds are base.seed + i. The best
/// row per method maximises median accuracy (or minimises median loss when
/// there is none); ties keep the first C.
std::vector<SweepRow> sweep_thresholds(const ProblemFactory& factory, const FLConfig& base,
                                       std::span<const Method> methods,
                                       std::span<const double> grid, std::size_t n_seeds);

double median_of(std::vector<double> v);

}  // namespace otafl

#endif  // OTAFL_FL_CORE_HPP_
