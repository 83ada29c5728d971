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

#include "otafl/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "otafl/clipping.hpp"
#include "otafl/errors.hpp"

namespace otafl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinPc = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void TheoremParams::validate() const {
  if (!(lipschitz > 0.0)) throw DomainError("theorem: L must be > 0");
  if (!(eta > 0.0)) throw DomainError("theorem: eta must be > 0");
  if (!(grad_bound >= 0.0)) throw DomainError("theorem: G must be >= 0");
  if (!(clip > 0.0)) throw DomainError("theorem: C must be > 0");
  if (rounds < 1) throw DomainError("theorem: K must be >= 1");
  if (dim < 1) throw DomainError("theorem: d must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("theorem: alpha must lie in (0, 2]");
  if (!(tau >= 0.0)) throw DomainError("theorem: tau must be >= 0");
  if (!(f0 >= f_star)) throw DomainError("theorem: f(w0) below f_star");
  if (eta > 2.0 / lipschitz) {
    throw RegimeError("eta <= 2/L", "eta = " + fmt(eta) + " exceeds 2/L = " + fmt(2.0 / lipschitz));
  }
  if (!(2.0 - eta * lipschitz > 2e-12)) {
    throw RegimeError("eta < 2/L", "learning-rate at boundary: eta = 2/L = " + fmt(eta) +
                                       " makes 2 - eta L vanish");
  }
  if (clip < std::numbers::sqrt2 * grad_bound) {
    throw RegimeError("C > sqrt(2) G", "C = " + fmt(clip) + " but sqrt(2) G = " +
                                           fmt(std::numbers::sqrt2 * grad_bound));
  }
  if (p_c && !(*p_c > 0.0 && *p_c <= 1.0)) throw DomainError("theorem: p_C must lie in (0, 1]");
}

double TheoremParams::unclipped_prob() const {
  double pc = p_c ? *p_c : 1.0 - std::min(1.0, std::pow(tau / clip, alpha));
  return std::clamp(pc, kMinPc, 1.0);
}

TheoremTerms theorem1_terms(const TheoremParams& p) {
  p.validate();
  TheoremTerms t;
  t.p_c = p.unclipped_prob();
  const double k = static_cast<double>(p.rounds);
  const double d = static_cast<double>(p.dim);
  t.transient = 2.0 * (p.f0 - p.f_star) / (k * t.p_c * (2.0 - p.eta * p.lipschitz) * p.eta);
  const double gap = std::numbers::sqrt2 / 2.0 * p.clip - p.grad_bound;
  t.residual = 0.5 * p.eta * p.eta * d * p.lipschitz *
               (t.p_c * gap * gap + (1.0 - t.p_c) * p.clip * p.clip);
  return t;
}

double theorem1_rhs(const TheoremParams& p) { return theorem1_terms(p).total(); }

Problem make_quadratic_testbed(const QuadraticTestbedSpec& spec) {
  if (spec.dim == 0 || spec.n_clients == 0) throw DomainError("testbed: dim and n_clients >= 1");
  if (!(spec.eig_min > 0.0 && spec.eig_max >= spec.eig_min && spec.target_l > 0.0)) {
    throw DomainError("testbed: need 0 < eig_min <= eig_max and target_l > 0");
  }
  Rng rng(derive_seed(spec.seed, Stream::kData));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> eig(spec.eig_min, spec.eig_max);
  const auto d = static_cast<Eigen::Index>(spec.dim);

  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::VectorXd> b;
  for (std::size_t n = 0; n < spec.n_clients; ++n) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd lam(d);
    for (Eigen::Index i = 0; i < d; ++i) lam(i) = eig(rng);
    Eigen::MatrixXd an = q * lam.asDiagonal() * q.transpose();
    a.push_back(0.5 * (an + an.transpose()));
    Eigen::VectorXd bn(d);
    for (Eigen::Index i = 0; i < d; ++i) bn(i) = spec.b_scale * normal(rng);
    b.push_back(bn);
  }
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  for (const auto& an : a) mean += an;
  mean /= static_cast<double>(a.size());
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mean).eigenvalues().maxCoeff();
  for (auto& an : a) an *= spec.target_l / top;

  Problem p{make_quadratic(std::move(a), std::move(b)), {}, std::nullopt};
  for (std::size_t n = 0; n < spec.n_clients; ++n) p.clients.push_back(ClientDataset{n, Dataset{}});
  return p;
}

Theorem1Report verify_theorem1(const Theorem1Config& cfg) {
  const Problem& problem = cfg.problem;
  if (!problem.model.is_quadratic()) throw StructureError("verify_theorem1: needs a quadratic model");
  if (cfg.k_grid.empty()) throw ConfigError("k_grid: empty");
  if (cfg.n_seeds == 0) throw ConfigError("n_seeds: must be >= 1");
  for (std::size_t k : cfg.k_grid) {
    if (k == 0) throw ConfigError("k_grid: K must be >= 1");
  }
  const bool noisy = cfg.base.channel.noise_enabled;

  Theorem1Report rep;
  rep.dim = problem.model.dim();
  SmoothnessOptions opts;
  opts.domain_radius = 1.0;
  SmoothnessInfo info = compute_smoothness(problem.model, problem.clients, opts);
  const ParamVector w0(rep.dim, 0.0);
  rep.domain_radius = cfg.domain_radius.value_or(2.0 * norm2(*info.minimizer));
  if (!(rep.domain_radius > 0.0)) throw DomainError("verify_theorem1: domain radius must be > 0");
  opts.domain_radius = rep.domain_radius;
  info = compute_smoothness(problem.model, problem.clients, opts);
  rep.lipschitz = info.lipschitz;
  rep.grad_bound = info.grad_bound;
  rep.f_star = info.f_star;
  rep.f0 = global_loss(problem.model, w0, problem.clients);
  rep.clip = cfg.clip_factor * info.grad_bound;

  auto params_for = [&](double eta, std::size_t k) {
    TheoremParams tp;
    tp.lipschitz = rep.lipschitz;
    tp.grad_bound = rep.grad_bound;
    tp.f0 = rep.f0;
    tp.f_star = rep.f_star;
    tp.eta = eta;
    tp.clip = rep.clip;
    tp.rounds = k;
    tp.dim = rep.dim;
    tp.alpha = cfg.base.channel.noise.alpha;
    tp.tau = noisy ? cfg.base.channel.noise.tau : 0.0;
    if (!noisy) {
      tp.p_c = 1.0;
    } else if (cfg.measure_p_c) {
      tp.p_c = rep.p_c;
    }
    return tp;
  };

  if (noisy && cfg.measure_p_c) {
    Rng rng(derive_seed(cfg.base.seed, Stream::kProbe));
    rep.p_c = estimate_unclipped_prob(cfg.base.channel.noise, rep.clip, rep.grad_bound,
                                      cfg.p_c_samples, rng);
  }
  // Validate the regime once before any training.
  rep.p_c = params_for(cfg.base.learning_rate, 1).unclipped_prob();
  theorem1_terms(params_for(cfg.base.learning_rate, 1));

  const std::size_t k_max = *std::max_element(cfg.k_grid.begin(), cfg.k_grid.end());

  // Mean over seeds of prefix averages of |grad f(w_k)|^2 for every K in grid.
  auto run_eta = [&](double eta, std::span<const std::size_t> grid) {
    FLConfig fl = cfg.base;
    fl.learning_rate = eta;
    fl.local_lr = eta;
    fl.local_epochs = 1;
    fl.batch_size = 0;
    fl.rounds = k_max;
    fl.n_clients = problem.clients.size();
    fl.clip = ClipMethod::mac(rep.clip);
    fl.projection_radius = rep.domain_radius;
    fl.divergence_factor = std::numeric_limits<double>::max();
    check_theorem_regime(fl, info);
    std::vector<double> sums(grid.size(), 0.0);
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
      fl.seed = cfg.base.seed + s;
      const RunResult run = run_training(problem, fl, w0);
      if (run.diverged) ++rep.diverged_runs;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (std::size_t k = 0; k < grid[g]; ++k) {
          acc += k < run.records.size() ? run.records[k].grad_norm_sq
                                        : std::numeric_limits<double>::infinity();
        }
        sums[g] += acc / static_cast<double>(grid[g]);
      }
    }
    for (double& v : sums) v /= static_cast<double>(cfg.n_seeds);
    return sums;
  };

  auto make_row = [&](double eta, std::size_t k, double empirical) {
    Theorem1Row row;
    row.rounds = k;
    row.eta = eta;
    row.empirical_avg_grad_sq = empirical;
    const TheoremTerms t = theorem1_terms(params_for(eta, k));
    row.transient = t.transient;
    row.residual = noisy ? t.residual : 0.0;
    row.classical = !noisy;
    row.bound_rhs = row.transient + row.residual;
    row.margin_ratio = empirical / row.bound_rhs;
    return row;
  };

  const auto avgs = run_eta(cfg.base.learning_rate, cfg.k_grid);
  for (std::size_t g = 0; g < cfg.k_grid.size(); ++g) {
    rep.k_rows.push_back(make_row(cfg.base.learning_rate, cfg.k_grid[g], avgs[g]));
  }
  const std::size_t k_only[] = {k_max};
  for (double eta : cfg.eta_grid) {
    rep.eta_rows.push_back(make_row(eta, k_max, run_eta(eta, k_only)[0]));
  }
  return rep;
}

ParamVector ClipDecomposition::reconstruct(std::span<const double> g) const {
  if (g.size() != selection.size()) throw StructureError("reconstruct: dimension mismatch");
  ParamVector out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = selection[i] ? g[i] : median + boundary[i];
  }
  return out;
}

ClipDecomposition decompose_clip_event(std::span<const double> g, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("decompose_clip_event: C must be > 0");
  ClipDecomposition out;
  out.median = vector_median(g);
  out.selection.resize(g.size());
  out.boundary.assign(g.size(), 0.0);
  out.residual.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double centred = g[i] - out.median;
    const bool kept = !(std::abs(centred) > threshold);
    out.selection[i] = kept ? 1 : 0;
    if (!kept) out.boundary[i] = std::copysign(threshold, centred);
    out.residual[i] = kept ? centred : out.boundary[i];
  }
  return out;
}

Lemma1Report lemma1_report(const Lemma1Config& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("alphas: empty");
  if (cfg.c_grid.empty()) throw ConfigError("c_grid: empty");
  if (!(cfg.grad_bound >= 0.0)) throw ConfigError("grad_bound: must be >= 0");
  Lemma1Report rep;
  for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
    const StableParams params{cfg.alphas[ai], cfg.tau};
    params.validate();
    std::vector<double> cs, ps;
    for (double c : cfg.c_grid) {
      if (!(c > 0.0)) throw ConfigError("c_grid: thresholds must be > 0");
      Lemma1Row row;
      row.alpha = params.alpha;
      row.clip = c;
      row.asymptote = tail_prob_simplified(params, c);
      row.outside_asymptotic_regime = row.asymptote >= cfg.asymptotic_cutoff;
      if (!(c > std::numbers::sqrt2 * cfg.grad_bound)) {
        row.regime_violation = true;
        row.empirical_clip_prob = kNaN;
        rep.rows.push_back(row);
        continue;
      }
      Rng rng(derive_seed(cfg.seed, Stream::kProbe, ai));
      row.empirical_clip_prob =
          1.0 - estimate_unclipped_prob(params, c, cfg.grad_bound, cfg.n_samples, rng, cfg.law);
      if (auto pc = unclipped_prob_closed_form(params, c, cfg.grad_bound, cfg.law)) {
        row.oracle_clip_prob = 1.0 - *pc;
      }
      if (!row.outside_asymptotic_regime) {
        cs.push_back(c);
        ps.push_back(row.empirical_clip_prob);
      }
      rep.rows.push_back(row);
    }
    Lemma1Fit fit;
    fit.alpha = params.alpha;
    fit.points = 0;
    for (std::size_t i = 0; i < cs.size(); ++i) fit.points += ps[i] > 0.0 ? 1 : 0;
    fit.slope = fit.points >= 2 ? loglog_slope(cs, ps) : kNaN;
    rep.fits.push_back(fit);
  }
  return rep;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StructureError("loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw DomainError("loglog_slope: need two positive points");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("loglog_slope: all x equal");
  return sxy / sxx;
}

double fit_tail_exponent(std::span<const double> samples, double lower_quantile,
                         std::size_t points) {
  if (samples.size() < 100) throw DomainError("fit_tail_exponent: need at least 100 samples");
  if (!(lower_quantile > 0.0 && lower_quantile < 1.0)) {
    throw DomainError("fit_tail_exponent: quantile must lie in (0, 1)");
  }
  if (points < 2) throw DomainError("fit_tail_exponent: need at least two points");
  std::vector<double> mag(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) mag[i] = std::abs(samples[i]);
  std::sort(mag.begin(), mag.end());
  const auto n = static_cast<double>(mag.size());
  const double x0 = mag[static_cast<std::size_t>(lower_quantile * (n - 1.0))];
  if (!(x0 > 0.0)) throw DomainError("fit_tail_exponent: degenerate lower quantile");
  std::vector<double> xs(points), ss(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x0 * std::pow(10.0, static_cast<double>(i) / static_cast<double>(points - 1));
    const auto above = static_cast<double>(mag.end() - std::upper_bound(mag.begin(), mag.end(), x));
    xs[i] = x;
    ss[i] = above / n;
  }
  return -loglog_slope(xs, ss);
}

}  // namespace otafl
