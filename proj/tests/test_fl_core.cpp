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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "otafl/analysis.hpp"
#include "otafl/data.hpp"
#include "otafl/errors.hpp"
#include "otafl/fl_core.hpp"
#include "test_util.hpp"

using namespace otafl;
using otafl::testing::abs_close;

namespace {

Problem quadratic_problem(std::size_t dim, std::size_t clients, std::uint64_t seed) {
  QuadraticTestbedSpec spec;
  spec.dim = dim;
  spec.n_clients = clients;
  spec.seed = seed;
  return make_quadratic_testbed(spec);
}

Problem synthetic_problem(std::size_t n_clients, std::uint64_t seed, std::size_t hidden = 0) {
  Rng rng(derive_seed(seed, Stream::kData));
  const Dataset all = make_synthetic_classification(2000, 20, 2, 1.5, rng);
  Rng split(derive_seed(seed, Stream::kSplit));
  auto [train, test] = split_train_test(all, 0.2, split);
  ModelSpec model = hidden ? make_mlp(20, hidden, 2) : make_logistic(20, 2);
  return {std::move(model),
          partition(train, {PartitionSpec::Kind::kDirichlet, 0.3, n_clients,
                            derive_seed(seed, Stream::kPartition)}),
          std::move(test)};
}

FLConfig full_batch(std::size_t n_clients, std::size_t rounds, double eta) {
  FLConfig cfg;
  cfg.n_clients = n_clients;
  cfg.rounds = rounds;
  cfg.learning_rate = eta;
  cfg.local_epochs = 1;
  cfg.batch_size = 0;
  cfg.channel = ChannelConfig::ideal();
  return cfg;
}

bool same_records(const std::vector<RoundRecord>& a, const std::vector<RoundRecord>& b) {
  if (a.size() != b.size()) return false;
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.round != y.round || !same(x.global_loss, y.global_loss) ||
        !same(x.grad_norm_sq, y.grad_norm_sq) || x.snr_db != y.snr_db ||
        x.clipped_fraction != y.clipped_fraction || !same(x.update_norm, y.update_norm) ||
        x.eval_accuracy != y.eval_accuracy || !same(x.median_mean_gap, y.median_mean_gap) ||
        x.diverged != y.diverged) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("one ideal round is a gradient step") {
  const Problem p = quadratic_problem(4, 3, 1);
  const FLConfig cfg = full_batch(3, 1, 0.7);
  const ParamVector w0{0.3, -0.2, 1.0, 0.5};
  FLState state = initial_state(p, cfg, w0);
  run_round(state, p, cfg);
  const ParamVector g = global_gradient(p.model, w0, p.clients);
  for (std::size_t i = 0; i < 4; ++i) CHECK(abs_close(state.w[i], w0[i] - 0.7 * g[i], 1e-15));
}

TEST_CASE("ideal channel without clipping is full-gradient descent") {
  const Problem p = quadratic_problem(10, 5, 2);
  const FLConfig cfg = full_batch(5, 200, 1.0);
  FLState state = initial_state(p, cfg, ParamVector(10, 1.0));
  ParamVector w = state.w;
  for (int k = 0; k < 200; ++k) {
    run_round(state, p, cfg);
    axpy(-1.0, global_gradient(p.model, w, p.clients), w);
    for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(abs_close(state.w[i], w[i], 1e-10));
  }
}

TEST_CASE("large-threshold MAC reproduces the unclipped trajectory") {
  const Problem p = synthetic_problem(10, 3);
  FLConfig none = full_batch(10, 50, 0.03);
  none.local_epochs = 2;
  none.batch_size = 10;
  FLConfig mac = none;
  mac.clip = ClipMethod::mac(1e12);
  const auto a = run_training(p, none);
  const auto b = run_training(p, mac);
  CHECK(a.final_w == b.final_w);
  CHECK(same_records(a.records, b.records));
}

TEST_CASE("MAC bounds every update") {
  const Problem p = synthetic_problem(10, 4, 8);
  FLConfig cfg = full_batch(10, 40, 0.03);
  cfg.local_epochs = 2;
  cfg.batch_size = 10;
  cfg.channel = ChannelConfig{};
  cfg.channel.noise = {1.1, 0.5};
  const double c = 0.2;
  cfg.clip = ClipMethod::mac(c);
  FLState state = initial_state(p, cfg);
  for (int k = 0; k < 40; ++k) {
    const ParamVector before = state.w;
    const auto rec = run_round(state, p, cfg);
    REQUIRE_FALSE(rec.diverged);
    ParamVector delta(before.size());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = state.w[i] - before[i];
    // Each block of the step is med(g_b) +/- C, so med(delta_b) = -eta med(g_b).
    for (const auto& block : split_blocks(delta, p.model.block_layout()).blocks) {
      const double med = -vector_median(block) / cfg.learning_rate;
      const double bound = cfg.learning_rate * (std::abs(med) + c);
      CHECK(norm_inf(block) <= bound * (1 + 1e-12) + 1e-15);
      const auto [lo, hi] = std::minmax_element(block.begin(), block.end());
      CHECK(*hi - *lo <= 2.0 * cfg.learning_rate * c * (1 + 1e-12) + 1e-15);
    }
    for (double f : rec.clipped_fraction) CHECK((f >= 0.0 && f <= 1.0));
  }
}

TEST_CASE("channel randomness does not perturb client randomness") {
  const Problem p = synthetic_problem(6, 5, 4);
  FLConfig quiet = full_batch(6, 1, 0.03);
  quiet.local_epochs = 2;
  quiet.batch_size = 5;
  quiet.seed = 11;
  FLConfig noisy = quiet;
  noisy.channel.fading = FadingModel::none();
  noisy.channel.noise = {1.5, 0.1};
  noisy.channel.noise_enabled = true;

  FLState a = initial_state(p, quiet), b = initial_state(p, noisy);
  CHECK(a.w == b.w);
  run_round(a, p, quiet);
  run_round(b, p, noisy);
  Rng channel(derive_seed(11, Stream::kChannel, 0));
  const ParamVector xi = sample_sas(noisy.channel.noise, p.model.dim(), channel);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    CHECK(abs_close(b.w[i] - a.w[i], -0.03 * xi[i], 1e-12));
  }

  // A different seed changes the init stream and the batch order.
  FLConfig other = quiet;
  other.seed = 12;
  FLState c = initial_state(p, other);
  CHECK(c.w != initial_state(p, quiet).w);
}

TEST_CASE("determinism and record count") {
  const Problem p = synthetic_problem(50, 6);
  FLConfig cfg;  // default protocol
  cfg.clip = ClipMethod::mac(1.0);
  cfg.channel.noise = {1.5, 0.1};
  const auto a = run_training(p, cfg);
  const auto b = run_training(p, cfg);
  CHECK(a.records.size() == 200);
  CHECK(same_records(a.records, b.records));
  CHECK(a.final_w == b.final_w);
  for (const auto& r : a.records) {
    CHECK(std::isfinite(r.global_loss));
    CHECK(std::isfinite(r.grad_norm_sq));
    CHECK(r.snr_db.has_value());
    CHECK(r.eval_accuracy.has_value());
    CHECK(r.clipped_fraction.size() == 2);
    CHECK(std::isfinite(r.median_mean_gap));
  }
  CHECK(*a.final_eval.accuracy > 0.6);

  FLConfig one = cfg;
  one.rounds = 1;
  CHECK(run_training(p, one).records.size() == 1);
  FLConfig zero = cfg;
  zero.rounds = 0;
  CHECK_THROWS_AS(run_training(p, zero), ConfigError);
}

TEST_CASE("heavy-tailed noise without clipping blows up the gradient") {
  const Problem p = quadratic_problem(10, 5, 7);
  const auto info = compute_smoothness(p.model, p.clients);
  FLConfig base = full_batch(5, 200, 0.5);
  base.channel.fading = FadingModel::none();
  base.channel.noise = {1.5, 0.1};
  base.channel.noise_enabled = true;
  bool blown = false;
  for (std::uint64_t s = 0; s < 20 && !blown; ++s) {
    FLConfig none = base, mac = base;
    none.seed = mac.seed = s;
    mac.clip = ClipMethod::mac(0.1);
    double mac_max = 0.0, none_max = 0.0;
    for (const auto& r : run_training(p, mac, info.minimizer).records) mac_max = std::max(mac_max, r.grad_norm_sq);
    for (const auto& r : run_training(p, none, info.minimizer).records) none_max = std::max(none_max, r.grad_norm_sq);
    blown = none_max > 1e3 * mac_max;
  }
  CHECK(blown);
}

TEST_CASE("divergence is recorded, not thrown") {
  const Problem p = synthetic_problem(5, 9);
  FLConfig cfg = full_batch(5, 100, 0.03);
  cfg.channel.noise = {0.6, 5.0};
  cfg.channel.noise_enabled = true;
  cfg.divergence_factor = 10.0;
  const auto r = run_training(p, cfg);
  REQUIRE(r.diverged);
  CHECK(r.records.back().diverged);
  CHECK(r.records.size() < 100);
  CHECK(std::count_if(r.records.begin(), r.records.end(), [](const RoundRecord& x) { return x.diverged; }) == 1);
  CHECK_FALSE(r.diagnostic.empty());

  // The state is not advanced past a diverged round.
  FLState state = initial_state(p, cfg);
  state.w[0] = std::numeric_limits<double>::infinity();
  const ParamVector frozen = state.w;
  CHECK(run_round(state, p, cfg).diverged);
  CHECK(state.w == frozen);
}

TEST_CASE("evaluate") {
  Dataset d(1);
  d.add(std::vector<double>{-2.0}, 0);
  d.add(std::vector<double>{-1.0}, 0);
  d.add(std::vector<double>{1.0}, 1);
  d.add(std::vector<double>{3.0}, 1);
  const ModelSpec spec = make_logistic(1, 2);
  CHECK(*evaluate(spec, ParamVector{-5.0, 5.0, 0.0, 0.0}, d).accuracy == 1.0);
  const auto zero = evaluate(spec, ParamVector(4, 0.0), d);
  CHECK(*zero.accuracy == 0.5);
  CHECK(abs_close(zero.loss, std::log(2.0), 1e-15));

  const Problem q = quadratic_problem(3, 2, 0);
  const ParamVector w{1.0, 2.0, 3.0};
  const auto e = evaluate(q, w);
  CHECK_FALSE(e.accuracy.has_value());
  CHECK(e.loss == global_loss(q.model, w, q.clients));
}

TEST_CASE("configuration checks") {
  FLConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.learning_rate = 0.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("learning_rate"), ConfigError);
  cfg = FLConfig{};
  cfg.clip = ClipMethod::mac(-1.0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  const Problem p = quadratic_problem(3, 2, 0);
  FLConfig wrong = full_batch(3, 1, 0.1);
  FLState s = initial_state(p, wrong);
  CHECK_THROWS_AS(run_round(s, p, wrong), ConfigError);

  SmoothnessInfo info;
  info.lipschitz = 1.0;
  info.grad_bound = 1.0;
  FLConfig t = full_batch(2, 1, 2.5);
  CHECK_THROWS_AS(check_theorem_regime(t, info), RegimeError);
  t.learning_rate = 1.0;
  t.clip = ClipMethod::mac(1.0);
  CHECK_THROWS_AS(check_theorem_regime(t, info), RegimeError);
  t.clip = ClipMethod::mac(2.0 * std::sqrt(2.0));
  CHECK_NOTHROW(check_theorem_regime(t, info));
}

TEST_CASE("methods and sweep") {
  CHECK(parse_method("mac") == Method::kMac);
  CHECK(parse_method("ideal") == Method::kIdeal);
  CHECK(to_string(Method::kGnc) == "gnc");
  CHECK_THROWS_AS(parse_method("median"), ConfigError);

  FLConfig base;
  const FLConfig ideal = config_for_method(base, Method::kIdeal, 3.0);
  CHECK_FALSE(ideal.channel.noise_enabled);
  CHECK(ideal.clip.kind == ClipMethod::Kind::kNone);
  CHECK(config_for_method(base, Method::kGnc, 3.0).clip.threshold == 3.0);
  CHECK(config_for_method(base, Method::kNone, 3.0).channel.noise_enabled);

  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median_of({NAN, 1.0, 2.0}) == 2.0);

  FLConfig small = full_batch(4, 5, 0.1);
  small.channel = ChannelConfig{};
  const std::vector<Method> methods{Method::kMac, Method::kGnc};
  const std::vector<double> grid{0.5, 1.0};
  const auto rows = sweep_thresholds([](std::uint64_t s) { return synthetic_problem(4, s); }, small,
                                     methods, grid, 3);
  REQUIRE(rows.size() == 4);
  for (Method m : methods) {
    CHECK(std::count_if(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.method == m && r.best; }) == 1);
  }
  for (const auto& r : rows) CHECK((r.median_accuracy >= 0.0 && r.median_accuracy <= 1.0));
}
