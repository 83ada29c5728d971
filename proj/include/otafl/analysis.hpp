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

// Quantitative checks of the MAC convergence theory:
//
//   clip probability   1 - p_C ~ (tau / C)^alpha
//   convergence bound  (1/K) sum_k |grad f(w_k)|^2 <=
//                        2 (f0 - f*) / (K p_C (2 - eta L) eta)
//                      + 1/2 eta^2 d L (p_C (C/sqrt(2) - G)^2 + (1 - p_C) C^2)
//   selection form     mac_clip(g, C) = S g + (I - S)(med(g) 1 + C_hat)

#ifndef OTAFL_ANALYSIS_HPP_
#define OTAFL_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "otafl/fl_core.hpp"
#include "otafl/stable_noise.hpp"
#include "otafl/types.hpp"

namespace otafl {

struct TheoremParams {
  double lipschitz = 1.0;   // L
  double grad_bound = 0.0;  // G
  double f0 = 0.0;
  double f_star = 0.0;
  double eta = 1.0;
  double clip = 1.0;  // C
  std::size_t rounds = 1;  // K
  std::size_t dim = 1;     // d
  double alpha = 1.5;
  double tau = 0.1;  // 0 gives p_C = 1
  // Measured p_C; replaces the tail law when set.
  std::optional<double> p_c;

  /// Throws RegimeError (eta <= 2/L, eta < 2/L, C >= sqrt(2) G) or DomainError.
  void validate() const;
  /// 1 - (tau/C)^alpha, or the measured value, clamped to [1e-9, 1].
  double unclipped_prob() const;
};

struct TheoremTerms {
  double p_c = 1.0;
  double transient = 0.0;  // decays as 1/K
  double residual = 0.0;   // independent of K
  double total() const { return transient + residual; }
};

TheoremTerms theorem1_terms(const TheoremParams& p);
double theorem1_rhs(const TheoremParams& p);

/// Random symmetric positive definite clients with eigenvalues drawn in
/// [eig_min, eig_max], rescaled so that lambda_max(mean A_n) = target_l.
struct QuadraticTestbedSpec {
  std::size_t dim = 10;
  std::size_t n_clients = 5;
  double eig_min = 0.1;
  double eig_max = 1.0;
  double target_l = 1.0;
  double b_scale = 1.0;  // b_n ~ N(0, b_scale^2 I)
  std::uint64_t seed = 0;
};

Problem make_quadratic_testbed(const QuadraticTestbedSpec& spec);

struct Theorem1Config {
  Theorem1Config(Problem p, FLConfig b) : problem(std::move(p)), base(std::move(b)) {}

  Problem problem;                // Quadratic
  FLConfig base;                  // eta, channel, seed; rounds and clip are set here
  std::vector<std::size_t> k_grid{10, 100, 1000};
  std::size_t n_seeds = 20;
  std::optional<double> domain_radius;  // default 2 |w*|
  double clip_factor = 2.0 * 1.4142135623730951;  // C = clip_factor * G
  bool measure_p_c = false;       // use a Monte Carlo p_C instead of the tail law
  std::size_t p_c_samples = 1000000;
  std::vector<double> eta_grid;   // optional learning-rate sweep at max K
};

struct Theorem1Row {
  std::size_t rounds = 0;
  double eta = 0.0;
  double empirical_avg_grad_sq = 0.0;  // mean over seeds of (1/K) sum_k |grad f(w_k)|^2
  double bound_rhs = 0.0;
  double transient = 0.0;
  double residual = 0.0;
  double margin_ratio = 0.0;  // empirical / bound
  bool classical = false;     // ideal channel: bound is the noiseless descent bound
  bool within_bound() const { return empirical_avg_grad_sq <= bound_rhs; }
};

struct Theorem1Report {
  double lipschitz = 0.0;
  double grad_bound = 0.0;
  double f0 = 0.0;
  double f_star = 0.0;
  double clip = 0.0;
  double domain_radius = 0.0;
  double p_c = 1.0;
  std::size_t dim = 0;
  std::size_t diverged_runs = 0;
  std::vector<Theorem1Row> k_rows;
  std::vector<Theorem1Row> eta_rows;
};

/// Runs n_seeds MAC trainings of max(k_grid) rounds with w projected onto the
/// ball where G holds, and reports prefix averages against the bound. The
/// ideal channel (noise off) reports the classical bound with p_C = 1.
/// Throws RegimeError unless eta < 2/L.
Theorem1Report verify_theorem1(const Theorem1Config& cfg);

struct ClipDecomposition {
  double median = 0.0;
  std::vector<std::uint8_t> selection;  // s_i = 1 iff entry i is unclipped
  ParamVector boundary;                 // +/-C where clipped, 0 elsewhere
  ParamVector residual;                 // S (g - med) + (I - S) C_hat

  /// S g + (I - S)(med 1 + C_hat), evaluated entry-wise.
  ParamVector reconstruct(std::span<const double> g) const;
};

ClipDecomposition decompose_clip_event(std::span<const double> g, double threshold);

struct Lemma1Config {
  std::vector<double> alphas{1.1, 1.5, 1.9};
  double tau = 0.1;
  std::vector<double> c_grid{1.0, 1.7782794100389228, 3.1622776601683795, 5.623413251903491,
                             10.0};
  double grad_bound = 0.0;
  std::size_t n_samples = 1000000;
  std::uint64_t seed = 0;
  DifferenceLaw law = DifferenceLaw::kStability;
  // Rows whose asymptote (tau/C)^alpha reaches this are flagged.
  double asymptotic_cutoff = 0.1;
};

struct Lemma1Row {
  double alpha = 0.0;
  double clip = 0.0;
  double empirical_clip_prob = 0.0;  // 1 - p_hat_C; NaN on regime violation
  double asymptote = 0.0;            // (tau / C)^alpha, capped at 1
  std::optional<double> oracle_clip_prob;  // closed form where available
  bool outside_asymptotic_regime = false;
  bool regime_violation = false;
};

struct Lemma1Fit {
  double alpha = 0.0;
  double slope = 0.0;  // NaN with fewer than two usable points
  std::size_t points = 0;
};

struct Lemma1Report {
  std::vector<Lemma1Row> rows;
  std::vector<Lemma1Fit> fits;
};

/// Every C of one alpha reuses the same random stream, so the fitted slope
/// sees common random numbers.
Lemma1Report lemma1_report(const Lemma1Config& cfg);

/// Least-squares slope of log y against log x over points with x, y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Tail index estimate: minus the log-log slope of the empirical survival
/// function of |x| over [q_lower quantile, 10x that], on `points` geometric
/// evaluation points.
double fit_tail_exponent(std::span<const double> samples, double lower_quantile,
                         std::size_t points = 20);

}  // namespace otafl

#endif  // OTAFL_ANALYSIS_HPP_
