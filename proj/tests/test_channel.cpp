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
#include <vector>

#include "otafl/channel.hpp"
#include "otafl/errors.hpp"
#include "test_util.hpp"

using namespace otafl;
using otafl::testing::abs_close;
using otafl::testing::rel_close;

namespace {

ChannelConfig noisy_deterministic(double gain) {
  ChannelConfig cfg;
  cfg.fading = FadingModel::deterministic(gain);
  cfg.noise = {1.5, 0.1};
  cfg.noise_enabled = false;
  return cfg;
}

}  // namespace

TEST_CASE("sample_fading") {
  Rng rng(1);
  CHECK(sample_fading(FadingModel::none(), 5, rng) == std::vector<double>(5, 1.0));
  CHECK(sample_fading(FadingModel::deterministic(0.5), 3, rng) == std::vector<double>(3, 0.5));
  CHECK_THROWS_AS(sample_fading(FadingModel::deterministic(0.0), 3, rng), DomainError);
  CHECK_THROWS_AS(sample_fading(FadingModel::none(), 0, rng), StructureError);

  const auto h = sample_fading(FadingModel::rayleigh_unit_mean(), 1000000, rng);
  const double mean = std::accumulate(h.begin(), h.end(), 0.0) / 1e6;
  double var = 0.0;
  for (double x : h) var += (x - mean) * (x - mean);
  var /= 1e6 - 1;
  CHECK(abs_close(mean, 1.0, 0.01));
  CHECK(rel_close(var, (4.0 - std::numbers::pi) / std::numbers::pi, 0.05));
  CHECK(*std::min_element(h.begin(), h.end()) >= 0.0);

  // Rayleigh with scale sigma has mean sigma sqrt(pi / 2).
  const auto s = sample_fading(FadingModel::rayleigh_scale(1.0), 1000000, rng);
  CHECK(abs_close(std::accumulate(s.begin(), s.end(), 0.0) / 1e6, std::sqrt(std::numbers::pi / 2),
                  0.01));
}

TEST_CASE("per-client gain averages to one over rounds") {
  Rng rng(2);
  ChannelConfig cfg;
  std::vector<double> sum(8, 0.0);
  for (int k = 0; k < 10000; ++k) {
    const auto g = sample_round_gains(cfg, 8, rng);
    for (std::size_t n = 0; n < 8; ++n) sum[n] += g[n];
  }
  for (double s : sum) CHECK(abs_close(s / 10000, 1.0, 0.02));
  CHECK(sample_round_gains(ChannelConfig::ideal(), 4, rng) == std::vector<double>(4, 1.0));
}

TEST_CASE("aggregate examples") {
  Rng rng(3);
  const std::vector<ParamVector> two{{1, 1}, {3, 3}};
  CHECK(aggregate(two, std::vector<double>{1, 1}, ChannelConfig::ideal(), rng) ==
        ParamVector{2, 2});

  const std::vector<ParamVector> one{{2}};
  const auto cfg = noisy_deterministic(0.5);
  Rng g(4);
  const auto gains = sample_fading(cfg.fading, 1, g);
  CHECK(aggregate(one, gains, cfg, rng) == ParamVector{1.0});

  // Zero signal isolates the noise, which must match the sampler stream.
  ChannelConfig noisy;
  noisy.noise = {1.5, 0.1};
  const std::size_t d = 100000;
  const std::vector<ParamVector> zeros(3, ParamVector(d, 0.0));
  Rng a(5), b(5);
  const auto out = aggregate(zeros, std::vector<double>(3, 1.0), noisy, a);
  CHECK(out == sample_sas(noisy.noise, d, b));
  ParamVector sorted = out;
  std::nth_element(sorted.begin(), sorted.begin() + d / 2, sorted.end());
  CHECK(std::abs(sorted[d / 2]) < 0.005);
}

TEST_CASE("aggregate structure errors") {
  Rng rng(6);
  const std::vector<ParamVector> bad{{1, 2}, {1}};
  CHECK_THROWS_AS(aggregate(bad, std::vector<double>{1, 1}, ChannelConfig::ideal(), rng),
                  StructureError);
  const std::vector<ParamVector> ok{{1, 2}};
  CHECK_THROWS_AS(aggregate(ok, std::vector<double>{1, 1}, ChannelConfig::ideal(), rng),
                  StructureError);
  CHECK_THROWS_AS(aggregate(std::vector<ParamVector>{}, std::vector<double>{},
                            ChannelConfig::ideal(), rng),
                  StructureError);
}

TEST_CASE("ideal aggregate is the arithmetic mean") {
  Rng rng(7);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 9, d = 10000;
    std::vector<ParamVector> grads(n, ParamVector(d));
    for (auto& v : grads) for (double& x : v) x = nd(rng);
    Rng unused(0);
    const Rng before = unused;
    const auto out = aggregate(grads, std::vector<double>(n, 1.0), ChannelConfig::ideal(), unused);
    CHECK(unused == before);
    std::vector<ParamVector> rev(grads.rbegin(), grads.rend());
    const auto out_rev = aggregate(rev, std::vector<double>(n, 1.0), ChannelConfig::ideal(), unused);
    for (std::size_t i = 0; i < d; ++i) {
      long double s = 0;
      for (const auto& v : grads) s += v[i];
      const double mean = static_cast<double>(s / n);
      REQUIRE(abs_close(out[i], mean, 1e-12));
      REQUIRE(abs_close(out_rev[i], mean, 1e-12));
    }
  }
}

TEST_CASE("noise is fresh each round") {
  ChannelConfig cfg;
  Rng rng(8);
  const std::vector<ParamVector> grads{{1, 2, 3}};
  const auto first = aggregate_detailed(grads, std::vector<double>{1}, cfg, rng);
  const auto second = aggregate_detailed(grads, std::vector<double>{1}, cfg, rng);
  CHECK(first.signal == second.signal);
  CHECK(first.noise != second.noise);
  for (std::size_t i = 0; i < 3; ++i) CHECK(first.received[i] == first.signal[i] + first.noise[i]);
}

TEST_CASE("measure_snr") {
  CHECK(*measure_snr(ParamVector{1, 0}, ParamVector{0, 1}) == 0.0);
  CHECK(abs_close(*measure_snr(ParamVector{1}, ParamVector{std::sqrt(1e5)}), -50.0, 1e-9));
  CHECK(abs_close(*measure_snr(ParamVector{2}, ParamVector{1}), 6.0205999, 1e-6));
  CHECK_FALSE(measure_snr(ParamVector{1, 2}, ParamVector{0, 0}).has_value());
  CHECK_THROWS_AS(measure_snr(ParamVector{1}, ParamVector{1, 2}), StructureError);
}
