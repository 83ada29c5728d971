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

#include "otafl/fl_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "otafl/errors.hpp"

namespace otafl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

bool is_diverged_loss(double loss, double initial_loss, double factor) {
  return !std::isfinite(loss) || std::abs(loss) > factor * std::max(std::abs(initial_loss), 1.0);
}

}  // namespace

void FLConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (n_clients < 1) fail("n_clients", "must be >= 1");
  if (rounds < 1) fail("rounds", "must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate", "must be > 0");
  if (local_epochs < 1) fail("local_epochs", "must be >= 1");
  if (local_lr < 0.0 || !std::isfinite(local_lr)) fail("local_lr", "must be >= 0");
  if (eval_every < 1) fail("eval_every", "must be >= 1");
  if (!(divergence_factor > 1.0)) fail("divergence_factor", "must be > 1");
  if (projection_radius && !(*projection_radius > 0.0)) fail("projection_radius", "must be > 0");
  try {
    clip.validate();
    channel.fading.validate();
    if (channel.noise_enabled) channel.noise.validate();
  } catch (const DomainError& e) {
    fail("clip/channel", e.what());
  }
}

std::string FLConfig::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "n_clients=" << n_clients << " rounds=" << rounds << " learning_rate=" << learning_rate
     << " local_epochs=" << local_epochs << " batch_size=" << batch_size
     << " local_lr=" << effective_local_lr() << " clip=" << clip.to_string()
     << " fading=" << (channel.noise_enabled ? channel.fading.to_string() : "none")
     << " noise=";
  if (channel.noise_enabled) {
    os << "sas(alpha=" << channel.noise.alpha << ",tau=" << channel.noise.tau << ")";
  } else {
    os << "off";
  }
  os << " seed=" << seed << " eval_every=" << eval_every;
  if (projection_radius) os << " projection_radius=" << *projection_radius;
  return os.str();
}

void check_theorem_regime(const FLConfig& cfg, const SmoothnessInfo& info) {
  if (info.lipschitz > 0.0 && cfg.learning_rate > 2.0 / info.lipschitz) {
    std::ostringstream os;
    os << "eta = " << cfg.learning_rate << " exceeds 2/L = " << 2.0 / info.lipschitz;
    throw RegimeError("eta <= 2/L", os.str());
  }
  if (cfg.clip.kind == ClipMethod::Kind::kMac &&
      !(cfg.clip.threshold > std::sqrt(2.0) * info.grad_bound)) {
    std::ostringstream os;
    os << "C = " << cfg.clip.threshold << " but sqrt(2) G = " << std::sqrt(2.0) * info.grad_bound;
    throw RegimeError("C > sqrt(2) G", os.str());
  }
}

double RoundRecord::overall_clipped_fraction(const BlockLayout& layout) const {
  if (clipped_fraction.size() != layout.size()) return 0.0;
  double clipped = 0.0;
  for (std::size_t b = 0; b < layout.size(); ++b) {
    clipped += clipped_fraction[b] * static_cast<double>(layout[b]);
  }
  return clipped / static_cast<double>(layout_size(layout));
}

FLState initial_state(const Problem& problem, const FLConfig& cfg, std::optional<ParamVector> w0) {
  FLState state;
  if (w0) {
    if (w0->size() != problem.model.dim()) {
      throw StructureError("initial parameters have dimension " + std::to_string(w0->size()) +
                           ", model needs " + std::to_string(problem.model.dim()));
    }
    state.w = std::move(*w0);
  } else {
    Rng rng(derive_seed(cfg.seed, Stream::kInit));
    state.w = initial_parameters(problem.model, rng);
  }
  state.initial_loss = global_loss(problem.model, state.w, problem.clients);
  return state;
}

RoundRecord run_round(FLState& state, const Problem& problem, const FLConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (problem.clients.size() != cfg.n_clients) {
    throw ConfigError("n_clients: config says " + std::to_string(cfg.n_clients) +
                      " but the problem has " + std::to_string(problem.clients.size()));
  }
  const ModelSpec& spec = problem.model;
  RoundRecord rec;
  rec.round = state.round;
  rec.clipped_fraction.assign(spec.block_layout().size(), 0.0);
  rec.median_mean_gap = kNaN;

  auto finish = [&](bool diverged) {
    rec.diverged = diverged;
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++state.round;
    return rec;
  };

  if (!all_finite(state.w)) {
    rec.global_loss = kNaN;
    rec.grad_norm_sq = kNaN;
    return finish(true);
  }
  rec.global_loss = global_loss(spec, state.w, problem.clients);
  rec.grad_norm_sq = norm_sq(global_gradient(spec, state.w, problem.clients));
  if (problem.test && spec.is_classifier() && state.round % cfg.eval_every == 0) {
    rec.eval_accuracy = evaluate(spec, state.w, *problem.test).accuracy;
  }
  if (is_diverged_loss(rec.global_loss, state.initial_loss, cfg.divergence_factor)) {
    return finish(true);
  }

  const LocalTrainConfig local{cfg.local_epochs, cfg.batch_size, cfg.effective_local_lr(),
                               cfg.learning_rate};
  std::vector<ParamVector> pseudo;
  pseudo.reserve(problem.clients.size());
  for (const auto& client : problem.clients) {
    Rng batch_rng(derive_seed(cfg.seed, Stream::kBatch, state.round, client.client_id));
    pseudo.push_back(local_update(spec, state.w, client, local, batch_rng));
  }

  Rng channel_rng(derive_seed(cfg.seed, Stream::kChannel, state.round));
  const auto gains = sample_round_gains(cfg.channel, pseudo.size(), channel_rng);
  AggregateResult agg = aggregate_detailed(pseudo, gains, cfg.channel, channel_rng);
  if (!agg.noise.empty()) rec.snr_db = measure_snr(agg.signal, agg.noise);
  if (!all_finite(agg.received)) return finish(true);
  rec.median_mean_gap = vector_median(agg.received) - mean_of(agg.signal);

  const BlockedGradient clipped =
      apply_blockwise(split_blocks(agg.received, spec.block_layout()), cfg.clip,
                      rec.clipped_fraction);
  const ParamVector step = join_blocks(clipped);

  ParamVector next = state.w;
  axpy(-cfg.learning_rate, step, next);
  if (cfg.projection_radius) project_to_ball(next, *cfg.projection_radius);
  if (!all_finite(next)) return finish(true);

  double moved = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double delta = next[i] - state.w[i];
    moved += delta * delta;
  }
  rec.update_norm = std::sqrt(moved);
  state.w = std::move(next);
  return finish(false);
}

EvalResult evaluate(const ModelSpec& spec, std::span<const double> w, const Dataset& held_out) {
  if (!spec.is_classifier()) throw StructureError("evaluate: model has no samples");
  if (held_out.empty()) throw StructureError("evaluate: empty held-out set");
  EvalResult out;
  std::vector<std::size_t> rows(held_out.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  ParamVector scratch(w.size());
  out.loss = batch_loss_and_gradient(spec, w, held_out, rows, scratch);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    if (predict(spec, w, held_out.features(i)) == held_out.label(i)) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(held_out.size());
  return out;
}

EvalResult evaluate(const Problem& problem, std::span<const double> w) {
  if (problem.test && problem.model.is_classifier()) return evaluate(problem.model, w, *problem.test);
  return EvalResult{global_loss(problem.model, w, problem.clients), std::nullopt};
}

RunResult run_training(const Problem& problem, const FLConfig& cfg,
                       std::optional<ParamVector> w0) {
  cfg.validate();
  FLState state = initial_state(problem, cfg, std::move(w0));
  RunResult result;
  result.initial_loss = state.initial_loss;
  result.records.reserve(cfg.rounds);
  for (std::size_t k = 0; k < cfg.rounds; ++k) {
    result.records.push_back(run_round(state, problem, cfg));
    const RoundRecord& rec = result.records.back();
    if (rec.diverged) {
      result.diverged = true;
      std::ostringstream os;
      os << "diverged at round " << rec.round << ": loss " << rec.global_loss
         << " against initial " << state.initial_loss;
      result.diagnostic = os.str();
      break;
    }
  }
  result.final_w = state.w;
  result.final_eval = evaluate(problem, result.final_w);
  if (result.final_eval.accuracy && !all_finite(result.final_w)) result.final_eval.accuracy = 0.0;
  return result;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kMac: return "mac";
    case Method::kGnc: return "gnc";
    case Method::kNone: return "none";
    case Method::kIdeal: return "ideal";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "mac") return Method::kMac;
  if (name == "gnc") return Method::kGnc;
  if (name == "none") return Method::kNone;
  if (name == "ideal") return Method::kIdeal;
  throw ConfigError("method: unknown name \"" + name + "\" (expected mac, gnc, none or ideal)");
}

FLConfig config_for_method(const FLConfig& base, Method m, double threshold) {
  FLConfig cfg = base;
  switch (m) {
    case Method::kMac: cfg.clip = ClipMethod::mac(threshold); break;
    case Method::kGnc: cfg.clip = ClipMethod::gnc(threshold); break;
    case Method::kNone: cfg.clip = ClipMethod::none(); break;
    case Method::kIdeal:
      cfg.clip = ClipMethod::none();
      cfg.channel = ChannelConfig::ideal();
      break;
  }
  return cfg;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * v[n / 2 - 1] + 0.5 * v[n / 2];
}

std::vector<SweepRow> sweep_thresholds(const ProblemFactory& factory, const FLConfig& base,
                                       std::span<const Method> methods,
                                       std::span<const double> grid, std::size_t n_seeds) {
  if (grid.empty()) throw ConfigError("sweep: empty threshold grid");
  if (methods.empty()) throw ConfigError("sweep: no methods");
  if (n_seeds == 0) throw ConfigError("sweep: n_seeds must be >= 1");

  std::vector<Problem> problems;
  problems.reserve(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) problems.push_back(factory(base.seed + s));

  std::vector<SweepRow> rows;
  for (Method m : methods) {
    const std::size_t first = rows.size();
    for (double c : grid) {
      SweepRow row;
      row.method = m;
      row.threshold = c;
      std::vector<double> acc, loss;
      for (std::size_t s = 0; s < n_seeds; ++s) {
        FLConfig cfg = config_for_method(base, m, c);
        cfg.seed = base.seed + s;
        const RunResult r = run_training(problems[s], cfg);
        if (r.diverged) ++row.diverged_runs;
        loss.push_back(r.final_eval.loss);
        if (r.final_eval.accuracy) acc.push_back(*r.final_eval.accuracy);
      }
      row.median_accuracy = median_of(acc);
      row.median_loss = median_of(loss);
      rows.push_back(row);
    }
    std::size_t best = first;
    for (std::size_t i = first + 1; i < rows.size(); ++i) {
      const bool has_acc = !std::isnan(rows[i].median_accuracy);
      const bool better = has_acc ? rows[i].median_accuracy > rows[best].median_accuracy
                                  : rows[i].median_loss < rows[best].median_loss;
      if (better) best = i;
    }
    rows[best].best = true;
  }
  return rows;
}

}  // namespace otafl
