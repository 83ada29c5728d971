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

#include "otafl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "otafl/errors.hpp"

namespace otafl {

void FadingModel::validate() const {
  if ((kind == Kind::kDeterministic || kind == Kind::kRayleighScale) &&
      !(value > 0.0 && std::isfinite(value))) {
    throw DomainError("fading parameter must be a positive finite value");
  }
}

std::string FadingModel::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kRayleighUnitMean: return "rayleigh";
    case Kind::kRayleighScale: os << "rayleigh_scale:" << value; return os.str();
    case Kind::kNone: return "none";
    case Kind::kDeterministic: os << "deterministic:" << value; return os.str();
  }
  return "unknown";
}

std::vector<double> sample_fading(const FadingModel& model, std::size_t n_clients, Rng& rng) {
  model.validate();
  if (n_clients == 0) throw StructureError("sample_fading: need at least one client");
  std::vector<double> gains(n_clients, 1.0);
  switch (model.kind) {
    case FadingModel::Kind::kNone:
      break;
    case FadingModel::Kind::kDeterministic:
      std::fill(gains.begin(), gains.end(), model.value);
      break;
    case FadingModel::Kind::kRayleighUnitMean:
    case FadingModel::Kind::kRayleighScale: {
      const double sigma = model.kind == FadingModel::Kind::kRayleighUnitMean
                               ? std::sqrt(2.0 / std::numbers::pi)
                               : model.value;
      // Rayleigh(sigma) == Weibull(shape 2, scale sigma * sqrt(2)).
      std::weibull_distribution<double> rayleigh(2.0, sigma * std::numbers::sqrt2);
      for (double& h : gains) h = rayleigh(rng);
      break;
    }
  }
  return gains;
}

std::vector<double> sample_round_gains(const ChannelConfig& cfg, std::size_t n_clients,
                                       Rng& rng) {
  if (!cfg.noise_enabled) {
    if (n_clients == 0) throw StructureError("sample_round_gains: need at least one client");
    return std::vector<double>(n_clients, 1.0);
  }
  return sample_fading(cfg.fading, n_clients, rng);
}

AggregateResult aggregate_detailed(std::span<const ParamVector> client_grads,
                                   std::span<const double> gains, const ChannelConfig& cfg,
                                   Rng& rng) {
  if (client_grads.empty()) throw StructureError("aggregate: no client gradients");
  if (gains.size() != client_grads.size()) {
    throw StructureError("aggregate: " + std::to_string(gains.size()) + " gains for " +
                         std::to_string(client_grads.size()) + " clients");
  }
  const std::size_t d = client_grads.front().size();
  if (d == 0) throw StructureError("aggregate: empty gradient");
  for (const auto& g : client_grads) {
    if (g.size() != d) {
      throw StructureError("aggregate: client gradient dimension " + std::to_string(g.size()) +
                           " differs from " + std::to_string(d));
    }
  }

  AggregateResult out;
  out.signal.assign(d, 0.0);
  for (std::size_t n = 0; n < client_grads.size(); ++n) axpy(gains[n], client_grads[n], out.signal);
  const double inv_n = 1.0 / static_cast<double>(client_grads.size());
  for (double& x : out.signal) x *= inv_n;

  out.received = out.signal;
  if (cfg.noise_enabled) {
    out.noise.resize(d);
    fill_sas(cfg.noise, out.noise, rng);
    for (std::size_t i = 0; i < d; ++i) out.received[i] += out.noise[i];
  }
  return out;
}

ParamVector aggregate(std::span<const ParamVector> client_grads, std::span<const double> gains,
                      const ChannelConfig& cfg, Rng& rng) {
  return aggregate_detailed(client_grads, gains, cfg, rng).received;
}

std::optional<double> measure_snr(std::span<const double> true_grad,
                                  std::span<const double> noise_realization) {
  if (true_grad.size() != noise_realization.size()) {
    throw StructureError("measure_snr: gradient and noise dimensions differ");
  }
  const double noise_power = norm_sq(noise_realization);
  if (noise_power == 0.0) return std::nullopt;
  const double signal_power = norm_sq(true_grad);
  if (signal_power == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal_power / noise_power);
}

}  // namespace otafl
