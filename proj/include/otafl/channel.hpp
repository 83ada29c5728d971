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

// Analog multi-access uplink at gradient level:
//   g = (1/N) sum_n h_n * grad_n + xi,   xi_i ~ SaS(alpha, tau) i.i.d.

#ifndef OTAFL_CHANNEL_HPP_
#define OTAFL_CHANNEL_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otafl/stable_noise.hpp"
#include "otafl/types.hpp"

namespace otafl {

struct FadingModel {
  enum class Kind {
    kRayleighUnitMean,  // sigma = sqrt(2 / pi), E[h] = 1
    kRayleighScale,     // Rayleigh with scale sigma = value
    kNone,              // h = 1
    kDeterministic,     // h = value
  };

  Kind kind = Kind::kRayleighUnitMean;
  double value = 1.0;

  static FadingModel rayleigh_unit_mean() { return {Kind::kRayleighUnitMean, 1.0}; }
  static FadingModel rayleigh_scale(double sigma) { return {Kind::kRayleighScale, sigma}; }
  static FadingModel none() { return {Kind::kNone, 1.0}; }
  static FadingModel deterministic(double gain) { return {Kind::kDeterministic, gain}; }

  void validate() const;
  std::string to_string() const;
};

struct ChannelConfig {
  FadingModel fading = FadingModel::rayleigh_unit_mean();
  StableParams noise{};
  // false: ideal channel, h = 1 and xi = 0.
  bool noise_enabled = true;

  static ChannelConfig ideal() { return {FadingModel::none(), StableParams{}, false}; }
};

/// One gain per client for one round.
std::vector<double> sample_fading(const FadingModel& model, std::size_t n_clients, Rng& rng);

/// Gains actually applied in a round: all ones for the ideal channel.
std::vector<double> sample_round_gains(const ChannelConfig& cfg, std::size_t n_clients, Rng& rng);

struct AggregateResult {
  ParamVector received;  // what the server sees
  ParamVector signal;    // faded mean without noise
  ParamVector noise;     // xi; empty for the ideal channel
};

/// Superposition plus one fresh SaS draw per entry. With noise disabled the
/// result is the exact faded mean and no randomness is consumed.
AggregateResult aggregate_detailed(std::span<const ParamVector> client_grads,
                                   std::span<const double> gains, const ChannelConfig& cfg,
                                   Rng& rng);

ParamVector aggregate(std::span<const ParamVector> client_grads, std::span<const double> gains,
                      const ChannelConfig& cfg, Rng& rng);

/// 10 log10(|grad|^2 / |noise|^2). nullopt when the noise is identically zero.
std::optional<double> measure_snr(std::span<const double> true_grad,
                                  std::span<const double> noise_realization);

}  // namespace otafl

#endif  // OTAFL_CHANNEL_HPP_
