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

#include "otafl/stable_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "otafl/errors.hpp"

namespace otafl {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// U ~ Uniform(-pi/2, pi/2) with cos(U) > 0, W ~ Exp(1) with W > 0.
struct CmsDraw {
  double u;
  double w;
};

CmsDraw draw_cms(Rng& rng) {
  std::uniform_real_distribution<double> angle(-kHalfPi, kHalfPi);
  std::exponential_distribution<double> expo(1.0);
  double u = angle(rng);
  while (!(std::cos(u) > 0.0)) u = angle(rng);
  double w = expo(rng);
  while (!(w > 0.0)) w = expo(rng);
  return {u, w};
}

// Standard (tau = 1) symmetric stable variate from one (U, W) pair.
double standard_sas(double alpha, const CmsDraw& d) {
  if (alpha == 2.0) return 2.0 * std::sin(d.u) * std::sqrt(d.w);
  if (alpha == 1.0) return std::tan(d.u);
  const double cos_u = std::cos(d.u);
  return std::sin(alpha * d.u) / std::pow(cos_u, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * d.u) / d.w, (1.0 - alpha) / alpha);
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "tail index alpha must lie in (0, 2], got " << alpha;
    throw DomainError(os.str());
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    std::ostringstream os;
    os << "scale tau must be positive, got " << tau;
    throw DomainError(os.str());
  }
}

double sample_sas_one(const StableParams& params, Rng& rng) {
  params.validate();
  return params.tau * standard_sas(params.alpha, draw_cms(rng));
}

void fill_sas(const StableParams& params, std::span<double> out, Rng& rng) {
  params.validate();
  for (double& x : out) x = params.tau * standard_sas(params.alpha, draw_cms(rng));
}

ParamVector sample_sas(const StableParams& params, std::size_t dim, Rng& rng) {
  if (dim == 0) throw StructureError("sample_sas: dim must be >= 1");
  ParamVector out(dim);
  fill_sas(params, out, rng);
  return out;
}

double tail_prob_simplified(const StableParams& params, double threshold) {
  params.validate();
  if (!(threshold > 0.0)) throw DomainError("tail_prob_simplified: threshold must be > 0");
  return std::min(1.0, std::pow(params.tau / threshold, params.alpha));
}

double difference_scale(const StableParams& params, DifferenceLaw law) {
  params.validate();
  if (law == DifferenceLaw::kSqrt2Scale) return std::numbers::sqrt2 * params.tau;
  return std::pow(2.0, 1.0 / params.alpha) * params.tau;
}

namespace {

double unclipped_margin(double clip, double grad_bound) {
  if (!(clip > 0.0)) throw DomainError("clipping threshold C must be > 0");
  if (!(grad_bound >= 0.0)) throw DomainError("gradient bound G must be >= 0");
  const double margin = clip - std::numbers::sqrt2 * grad_bound;
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "C = " << clip << " <= sqrt(2) G = " << std::numbers::sqrt2 * grad_bound;
    throw RegimeError("C > sqrt(2) G", os.str());
  }
  return margin;
}

}  // namespace

double estimate_unclipped_prob(const StableParams& params, double clip, double grad_bound,
                               std::size_t n_samples, Rng& rng, DifferenceLaw law) {
  params.validate();
  const double margin = unclipped_margin(clip, grad_bound);
  if (n_samples < 10000) throw DomainError("estimate_unclipped_prob: need n_samples >= 10^4");

  std::size_t kept = 0;
  if (law == DifferenceLaw::kStability) {
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double xi_i = params.tau * standard_sas(params.alpha, draw_cms(rng));
      const double xi_m = params.tau * standard_sas(params.alpha, draw_cms(rng));
      if (std::abs(xi_i - xi_m) <= margin) ++kept;
    }
  } else {
    const double scale = difference_scale(params, law);
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (std::abs(scale * standard_sas(params.alpha, draw_cms(rng))) <= margin) ++kept;
    }
  }
  return static_cast<double>(kept) / static_cast<double>(n_samples);
}

std::optional<double> sas_abs_cdf(const StableParams& params, double x) {
  params.validate();
  if (x <= 0.0) return 0.0;
  if (params.alpha == 2.0) return std::erf(x / (2.0 * params.tau));
  if (params.alpha == 1.0) return 2.0 / std::numbers::pi * std::atan(x / params.tau);
  return std::nullopt;
}

std::optional<double> unclipped_prob_closed_form(const StableParams& params, double clip,
                                                 double grad_bound, DifferenceLaw law) {
  const double margin = unclipped_margin(clip, grad_bound);
  return sas_abs_cdf({params.alpha, difference_scale(params, law)}, margin);
}

}  // namespace otafl
