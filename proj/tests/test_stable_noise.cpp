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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "otafl/analysis.hpp"
#include "otafl/errors.hpp"
#include "otafl/stable_noise.hpp"
#include "test_util.hpp"

using namespace otafl;
using otafl::testing::abs_close;
using otafl::testing::rel_close;

namespace {

double quantile(ParamVector v, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

double variance(const ParamVector& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / (n - 1.0);
}

// Two-sided KS statistic against N(0, sigma^2).
double ks_gaussian(ParamVector v, double sigma) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = 0.5 * std::erfc(-v[i] / (sigma * std::numbers::sqrt2));
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("parameter validation") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_sas({0.0, 1.0}, 3, rng), DomainError);
  CHECK_THROWS_AS(sample_sas({2.1, 1.0}, 3, rng), DomainError);
  CHECK_THROWS_AS(sample_sas({1.5, 0.0}, 3, rng), DomainError);
  CHECK_THROWS_AS(sample_sas({1.5, -1.0}, 3, rng), DomainError);
  CHECK_THROWS_AS(sample_sas({1.5, 1.0}, 0, rng), StructureError);
  CHECK_NOTHROW(sample_sas({2.0, 1.0}, 1, rng));
  CHECK_NOTHROW(sample_sas({0.5, 1.0}, 1, rng));
}

TEST_CASE("alpha = 2 is Gaussian with variance 2 tau^2") {
  Rng rng(101);
  const ParamVector x = sample_sas({2.0, 1.0}, 1000000, rng);
  CHECK(rel_close(variance(x), 2.0, 0.05));

  Rng rng2(102);
  const ParamVector y = sample_sas({2.0, 0.1}, 100000, rng2);
  CHECK(ks_gaussian(y, std::numbers::sqrt2 * 0.1) < 0.005);
}

TEST_CASE("alpha = 1 is Cauchy with scale tau") {
  Rng rng(103);
  const ParamVector x = sample_sas({1.0, 0.5}, 1000000, rng);
  CHECK(std::abs(quantile(x, 0.5)) < 0.005);
  CHECK(rel_close(quantile(x, 0.75), 0.5 * std::tan(std::numbers::pi / 4), 0.05));
  for (double v : x) REQUIRE(std::isfinite(v));
}

TEST_CASE("tail exponent matches alpha") {
  for (double alpha : {1.1, 1.5, 1.9}) {
    CAPTURE(alpha);
    Rng a(200), b(201);
    const ParamVector xa = sample_sas({alpha, 0.1}, 1000000, a);
    const ParamVector xb = sample_sas({alpha, 0.1}, 1000000, b);
    const double fa = fit_tail_exponent(xa, 0.995);
    const double fb = fit_tail_exponent(xb, 0.995);
    CHECK(abs_close(fa, alpha, 0.15));
    CHECK(abs_close(fb, alpha, 0.15));
    CHECK(std::abs(fa - fb) < 0.15);
  }
}

TEST_CASE("determinism and scale equivariance") {
  for (double alpha : {0.7, 1.0, 1.5, 2.0}) {
    Rng a(7), b(7), c(7);
    const ParamVector x = sample_sas({alpha, 0.3}, 1000, a);
    CHECK(x == sample_sas({alpha, 0.3}, 1000, b));
    const ParamVector y = sample_sas({alpha, 0.3 * 4.0}, 1000, c);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(rel_close(y[i], 4.0 * x[i], 1e-14));
    }
  }
  Rng a(8), b(8);
  ParamVector filled(50);
  fill_sas({1.5, 1.0}, filled, a);
  CHECK(filled == sample_sas({1.5, 1.0}, 50, b));
}

TEST_CASE("symmetry of the sign") {
  for (double alpha : {1.1, 1.5, 1.9, 2.0}) {
    CAPTURE(alpha);
    Rng rng(300);
    const ParamVector x = sample_sas({alpha, 0.1}, 1000000, rng);
    double s = 0.0;
    for (double v : x) s += (v > 0) - (v < 0);
    CHECK(std::abs(s / 1e6) <= 0.01);
  }
}

TEST_CASE("tail_prob_simplified") {
  CHECK(tail_prob_simplified({1.5, 0.1}, 0.1) == doctest::Approx(1.0));
  CHECK(rel_close(tail_prob_simplified({1.5, 0.1}, 1.0), 0.0316227766, 1e-6));
  CHECK(tail_prob_simplified({2.0, 1.0}, 10.0) == doctest::Approx(0.01));
  CHECK(tail_prob_simplified({1.5, 0.1}, 0.01) == 1.0);
  CHECK_THROWS_AS(tail_prob_simplified({1.5, 0.1}, 0.0), DomainError);
  double prev = 1.0;
  for (double c = 0.05; c < 1e4; c *= 1.7) {
    const double p = tail_prob_simplified({1.5, 0.1}, c);
    CHECK(p <= prev);
    prev = p;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("difference scale") {
  CHECK(difference_scale({2.0, 0.1}, DifferenceLaw::kStability) ==
        doctest::Approx(std::numbers::sqrt2 * 0.1));
  CHECK(difference_scale({1.0, 0.1}, DifferenceLaw::kStability) == doctest::Approx(0.2));
  CHECK(difference_scale({1.0, 0.1}, DifferenceLaw::kSqrt2Scale) ==
        doctest::Approx(std::numbers::sqrt2 * 0.1));
}

TEST_CASE("estimate_unclipped_prob") {
  Rng rng(400);
  CHECK(estimate_unclipped_prob({1.5, 0.1}, 1e5, 0.0, 100000, rng) > 0.9999);

  // Difference of two N(0, 0.02) draws is N(0, 0.04): P{|D| <= 0.4} = erf(0.4 / (0.2 sqrt 2)).
  const double oracle = std::erf(0.4 / (0.2 * std::numbers::sqrt2));
  CHECK(abs_close(oracle, 0.9545, 1e-4));
  Rng g(401);
  CHECK(rel_close(estimate_unclipped_prob({2.0, 0.1}, 0.4, 0.0, 1000000, g), oracle, 0.01));
  CHECK(*unclipped_prob_closed_form({2.0, 0.1}, 0.4, 0.0) == doctest::Approx(oracle).epsilon(1e-12));

  // Cauchy difference has scale 2 tau.
  Rng c(402);
  const double cauchy = 2.0 / std::numbers::pi * std::atan(0.5 / 0.2);
  CHECK(std::abs(estimate_unclipped_prob({1.0, 0.1}, 0.5, 0.0, 1000000, c) - cauchy) < 0.005);
  Rng c2(403);
  const double cauchy_sqrt2 = 2.0 / std::numbers::pi * std::atan(0.5 / (std::numbers::sqrt2 * 0.1));
  CHECK(std::abs(estimate_unclipped_prob({1.0, 0.1}, 0.5, 0.0, 1000000, c2,
                                         DifferenceLaw::kSqrt2Scale) -
                 cauchy_sqrt2) < 0.005);

  // G shrinks the margin to C - sqrt(2) G.
  Rng m(404);
  const double shifted = std::erf((1.0 - std::numbers::sqrt2 * 0.4) / (0.2 * std::numbers::sqrt2));
  CHECK(std::abs(estimate_unclipped_prob({2.0, 0.1}, 1.0, 0.4, 1000000, m) - shifted) < 0.01);

  std::vector<double> cs{0.5, 1.0, 2.0, 4.0}, clip;
  for (double cc : cs) {
    Rng r(405);
    clip.push_back(1.0 - estimate_unclipped_prob({1.5, 0.1}, cc, 0.0, 1000000, r));
  }
  CHECK(abs_close(loglog_slope(cs, clip), -1.5, 0.15));

  Rng e(406);
  CHECK_THROWS_AS(estimate_unclipped_prob({1.5, 0.1}, 1.0, 1.0, 100000, e), RegimeError);
  CHECK_THROWS_AS(estimate_unclipped_prob({1.5, 0.1}, 1.0, 0.0, 100, e), DomainError);
}

TEST_CASE("closed-form absolute cdf") {
  CHECK(*sas_abs_cdf({1.0, 1.0}, 1.0) == doctest::Approx(0.5));
  CHECK(*sas_abs_cdf({2.0, 1.0}, 0.0) == 0.0);
  CHECK_FALSE(sas_abs_cdf({1.5, 1.0}, 1.0).has_value());
}
