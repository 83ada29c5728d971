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

// Symmetric alpha-stable (SaS) noise: exact sampling and the clip-probability
// utilities used to check the tail-probability law of the clipping threshold.
//
// Parameterisation: characteristic function exp(-|tau * t|^alpha). With this
// convention alpha = 2 is N(0, 2 tau^2) and alpha = 1 is Cauchy with scale tau.

#ifndef OTAFL_STABLE_NOISE_HPP_
#define OTAFL_STABLE_NOISE_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "otafl/types.hpp"

namespace otafl {

struct StableParams {
  double alpha = 1.5;  // tail index, (0, 2]
  double tau = 0.1;    // scale, > 0

  /// Throws DomainError unless 0 < alpha <= 2 and tau > 0.
  void validate() const;
};

/// One SaS(alpha, tau) draw (Chambers-Mallows-Stuck, beta = 0).
double sample_sas_one(const StableParams& params, Rng& rng);

/// `dim` i.i.d. SaS(alpha, tau) draws. Deterministic given the rng state.
ParamVector sample_sas(const StableParams& params, std::size_t dim, Rng& rng);

/// Overwrites `out` with i.i.d. draws; same stream as sample_sas.
void fill_sas(const StableParams& params, std::span<double> out, Rng& rng);

/// Constant-free tail law min(1, (tau / C)^alpha): the asymptotic probability
/// that an entry is clipped at threshold C.
double tail_prob_simplified(const StableParams& params, double threshold);

/// Law used for the difference xi_i - xi_m of two independent SaS draws.
enum class DifferenceLaw {
  // Exact stability property: SaS(alpha, 2^(1/alpha) tau), realised by
  // subtracting two independent draws.
  kStability,
  // SaS(alpha, sqrt(2) tau), which coincides with kStability only at alpha = 2.
  kSqrt2Scale,
};

/// Scale of the difference variable under the chosen law.
double difference_scale(const StableParams& params, DifferenceLaw law);

/// Monte Carlo estimate of P{|xi_i - xi_m| <= C - sqrt(2) G}.
/// Requires C > sqrt(2) G (RegimeError otherwise) and n_samples >= 10^4.
double estimate_unclipped_prob(const StableParams& params, double clip, double grad_bound,
                               std::size_t n_samples, Rng& rng,
                               DifferenceLaw law = DifferenceLaw::kStability);

/// P{|X| <= x} for X ~ SaS(alpha, tau) when a closed form exists
/// (alpha = 2 Gaussian, alpha = 1 Cauchy); nullopt otherwise.
std::optional<double> sas_abs_cdf(const StableParams& params, double x);

/// Closed-form P{|xi_i - xi_m| <= C - sqrt(2) G}; only for alpha in {1, 2}.
std::optional<double> unclipped_prob_closed_form(const StableParams& params, double clip,
                                                 double grad_bound,
                                                 DifferenceLaw law = DifferenceLaw::kStability);

}  // namespace otafl

#endif  // OTAFL_STABLE_NOISE_HPP_
