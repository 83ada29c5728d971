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

#include "otafl/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "otafl/errors.hpp"

namespace otafl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const ModelSpec& spec, std::span<const double> w) {
  if (w.size() != spec.dim()) {
    throw StructureError(spec.name() + ": parameter dimension " + std::to_string(w.size()) +
                         " differs from model dimension " + std::to_string(spec.dim()));
  }
}

void require_features(std::size_t expected, const Dataset& data) {
  if (!data.empty() && data.feature_dim() != expected) {
    throw StructureError("dataset feature dimension " + std::to_string(data.feature_dim()) +
                         " differs from model input dimension " + std::to_string(expected));
  }
}

const Eigen::MatrixXd& client_matrix(const QuadraticModel& q, std::size_t id) {
  if (id >= q.a.size()) {
    throw StructureError("quadratic model has no client " + std::to_string(id));
  }
  return q.a[id];
}

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> w) {
  return {w.data(), static_cast<Eigen::Index>(w.size())};
}

// log-sum-exp of z, robust to large magnitudes.
double log_sum_exp(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  if (!std::isfinite(zmax)) return zmax;
  double acc = 0.0;
  for (double v : z) acc += std::exp(v - zmax);
  return zmax + std::log(acc);
}

void check_label(int y, std::size_t classes) {
  if (y < 0 || static_cast<std::size_t>(y) >= classes) {
    throw StructureError("label " + std::to_string(y) + " outside model's " +
                         std::to_string(classes) + " classes");
  }
}

double logistic_batch(const LogisticModel& m, std::span<const double> w, const Dataset& data,
                      std::span<const std::size_t> rows, std::span<double> grad) {
  const std::size_t p = m.feature_dim;
  const std::size_t k = m.classes;
  const double* weights = w.data();
  const double* bias = w.data() + k * p;
  std::fill(grad.begin(), grad.end(), 0.0);
  double* g_weights = grad.data();
  double* g_bias = grad.data() + k * p;

  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto x = data.features(r);
    const int y = data.label(r);
    check_label(y, k);
    for (std::size_t c = 0; c < k; ++c) {
      double acc = bias[c];
      const double* wc = weights + c * p;
      for (std::size_t j = 0; j < p; ++j) acc += wc[j] * x[j];
      z[c] = acc;
    }
    const double lse = log_sum_exp(z);
    loss += lse - z[static_cast<std::size_t>(y)];
    for (std::size_t c = 0; c < k; ++c) {
      const double dz = std::exp(z[c] - lse) - (static_cast<std::size_t>(y) == c ? 1.0 : 0.0);
      double* gc = g_weights + c * p;
      for (std::size_t j = 0; j < p; ++j) gc[j] += dz * x[j];
      g_bias[c] += dz;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

double mlp_batch(const MlpModel& m, std::span<const double> w, const Dataset& data,
                 std::span<const std::size_t> rows, std::span<double> grad) {
  const std::size_t p = m.feature_dim;
  const std::size_t h = m.hidden;
  const std::size_t k = m.classes;
  const double* w1 = w.data();
  const double* b1 = w1 + h * p;
  const double* w2 = b1 + h;
  const double* b2 = w2 + k * h;
  std::fill(grad.begin(), grad.end(), 0.0);
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + h * p;
  double* g_w2 = g_b1 + h;
  double* g_b2 = g_w2 + k * h;

  std::vector<double> pre(h), act(h), z(k), dz(k), dh(h);
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto x = data.features(r);
    const int y = data.label(r);
    check_label(y, k);
    for (std::size_t u = 0; u < h; ++u) {
      double acc = b1[u];
      const double* wu = w1 + u * p;
      for (std::size_t j = 0; j < p; ++j) acc += wu[j] * x[j];
      pre[u] = acc;
      act[u] = m.activation == Activation::kRelu ? std::max(acc, 0.0) : std::tanh(acc);
    }
    for (std::size_t c = 0; c < k; ++c) {
      double acc = b2[c];
      const double* wc = w2 + c * h;
      for (std::size_t u = 0; u < h; ++u) acc += wc[u] * act[u];
      z[c] = acc;
    }
    const double lse = log_sum_exp(z);
    loss += lse - z[static_cast<std::size_t>(y)];
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      dz[c] = std::exp(z[c] - lse) - (static_cast<std::size_t>(y) == c ? 1.0 : 0.0);
      const double* wc = w2 + c * h;
      double* gc = g_w2 + c * h;
      for (std::size_t u = 0; u < h; ++u) {
        gc[u] += dz[c] * act[u];
        dh[u] += wc[u] * dz[c];
      }
      g_b2[c] += dz[c];
    }
    for (std::size_t u = 0; u < h; ++u) {
      const double da = m.activation == Activation::kRelu
                            ? (pre[u] > 0.0 ? dh[u] : 0.0)
                            : dh[u] * (1.0 - act[u] * act[u]);
      if (da == 0.0) continue;
      double* gu = g_w1 + u * p;
      for (std::size_t j = 0; j < p; ++j) gu[j] += da * x[j];
      g_b1[u] += da;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

double quadratic_value(const QuadraticModel& q, std::span<const double> w, std::size_t id) {
  const auto& a = client_matrix(q, id);
  const auto x = as_eigen(w);
  return 0.5 * x.dot(a * x) - q.b[id].dot(x);
}

void quadratic_gradient(const QuadraticModel& q, std::span<const double> w, std::size_t id,
                        std::span<double> grad) {
  const auto& a = client_matrix(q, id);
  Eigen::Map<Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(grad.size()));
  g.noalias() = a * as_eigen(w) - q.b[id];
}

std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

ModelSpec::ModelSpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [&](const QuadraticModel& q) {
                   if (q.a.empty() || q.a.size() != q.b.size()) {
                     throw StructureError("quadratic model needs one (A, b) pair per client");
                   }
                   const auto d = q.a.front().rows();
                   for (std::size_t n = 0; n < q.a.size(); ++n) {
                     if (d == 0 || q.a[n].rows() != d || q.a[n].cols() != d ||
                         q.b[n].size() != d) {
                       throw StructureError("quadratic client " + std::to_string(n) +
                                            " has inconsistent dimensions");
                     }
                     if (!q.a[n].isApprox(q.a[n].transpose(), 1e-12)) {
                       throw DomainError("quadratic client " + std::to_string(n) +
                                         ": A is not symmetric");
                     }
                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.a[n],
                                                                       Eigen::EigenvaluesOnly);
                     if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff())) {
                       throw DomainError("quadratic client " + std::to_string(n) +
                                         ": A is not positive semidefinite");
                     }
                   }
                   layout_ = {static_cast<std::size_t>(d)};
                 },
                 [&](const LogisticModel& m) {
                   if (m.feature_dim == 0 || m.classes < 2) {
                     throw DomainError("logistic model needs feature_dim >= 1 and classes >= 2");
                   }
                   layout_ = {m.classes * m.feature_dim, m.classes};
                 },
                 [&](const MlpModel& m) {
                   if (m.feature_dim == 0 || m.hidden == 0 || m.classes < 2) {
                     throw DomainError("mlp needs feature_dim, hidden >= 1 and classes >= 2");
                   }
                   layout_ = {m.hidden * m.feature_dim, m.hidden, m.classes * m.hidden,
                              m.classes};
                 },
             },
             kind_);
}

std::string ModelSpec::name() const {
  return std::visit(Overloaded{
                        [](const QuadraticModel&) { return std::string("quadratic"); },
                        [](const LogisticModel&) { return std::string("logistic"); },
                        [](const MlpModel& m) {
                          return std::string(m.activation == Activation::kRelu ? "mlp-relu"
                                                                               : "mlp-tanh");
                        },
                    },
                    kind_);
}

ModelSpec make_quadratic(std::vector<Eigen::MatrixXd> a, std::vector<Eigen::VectorXd> b) {
  return ModelSpec(QuadraticModel{std::move(a), std::move(b)});
}

ModelSpec make_logistic(std::size_t feature_dim, std::size_t classes) {
  return ModelSpec(LogisticModel{feature_dim, classes});
}

ModelSpec make_mlp(std::size_t feature_dim, std::size_t hidden, std::size_t classes,
                   Activation activation) {
  return ModelSpec(MlpModel{feature_dim, hidden, classes, activation});
}

ParamVector initial_parameters(const ModelSpec& spec, Rng& rng) {
  ParamVector w(spec.dim(), 0.0);
  if (const auto* m = std::get_if<MlpModel>(&spec.kind())) {
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
    const double s1 = 1.0 / std::sqrt(static_cast<double>(m->feature_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(m->hidden));
    std::uniform_real_distribution<double> u1(-s1, s1), u2(-s2, s2);
    const std::size_t n1 = m->hidden * m->feature_dim;
    const std::size_t off2 = n1 + m->hidden;
    for (std::size_t i = 0; i < n1; ++i) w[i] = u1(rng);
    for (std::size_t i = 0; i < m->classes * m->hidden; ++i) w[off2 + i] = u2(rng);
  }
  return w;
}

double batch_loss_and_gradient(const ModelSpec& spec, std::span<const double> w,
                               const Dataset& data, std::span<const std::size_t> rows,
                               std::span<double> grad) {
  require_dim(spec, w);
  if (grad.size() != w.size()) throw StructureError("gradient buffer has wrong size");
  if (rows.empty()) throw StructureError("empty batch");
  return std::visit(
      Overloaded{
          [&](const QuadraticModel&) -> double {
            throw StructureError("quadratic models have no samples to batch over");
          },
          [&](const LogisticModel& m) {
            require_features(m.feature_dim, data);
            return logistic_batch(m, w, data, rows, grad);
          },
          [&](const MlpModel& m) {
            require_features(m.feature_dim, data);
            return mlp_batch(m, w, data, rows, grad);
          },
      },
      spec.kind());
}

double local_loss(const ModelSpec& spec, std::span<const double> w, const ClientDataset& data) {
  require_dim(spec, w);
  if (const auto* q = std::get_if<QuadraticModel>(&spec.kind())) {
    return quadratic_value(*q, w, data.client_id);
  }
  if (data.data.empty()) throw StructureError("client " + std::to_string(data.client_id) + " has no samples");
  ParamVector scratch(w.size());
  const auto rows = all_rows(data.data);
  return batch_loss_and_gradient(spec, w, data.data, rows, scratch);
}

ParamVector local_gradient(const ModelSpec& spec, std::span<const double> w,
                           const ClientDataset& data) {
  require_dim(spec, w);
  ParamVector grad(w.size());
  if (const auto* q = std::get_if<QuadraticModel>(&spec.kind())) {
    quadratic_gradient(*q, w, data.client_id, grad);
    return grad;
  }
  if (data.data.empty()) throw StructureError("client " + std::to_string(data.client_id) + " has no samples");
  const auto rows = all_rows(data.data);
  batch_loss_and_gradient(spec, w, data.data, rows, grad);
  return grad;
}

ParamVector local_update(const ModelSpec& spec, std::span<const double> w,
                         const ClientDataset& data, const LocalTrainConfig& cfg, Rng& rng) {
  require_dim(spec, w);
  if (cfg.epochs == 0) throw DomainError("local_update: epochs must be >= 1");
  if (!(cfg.local_lr > 0.0) || !(cfg.server_lr > 0.0)) {
    throw DomainError("local_update: learning rates must be > 0");
  }
  const double factor = cfg.local_lr / cfg.server_lr;
  ParamVector w_local(w.begin(), w.end());
  ParamVector pseudo(w.size(), 0.0);
  ParamVector grad(w.size());

  auto step = [&] {
    axpy(factor, grad, pseudo);
    axpy(-cfg.local_lr, grad, w_local);
  };

  if (const auto* q = std::get_if<QuadraticModel>(&spec.kind())) {
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
      quadratic_gradient(*q, w_local, data.client_id, grad);
      step();
    }
    return pseudo;
  }

  if (data.data.empty()) {
    throw StructureError("local_update: client " + std::to_string(data.client_id) +
                         " has no samples");
  }
  auto rows = all_rows(data.data);
  const std::size_t m = rows.size();
  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size >= m) ? m : cfg.batch_size;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    if (batch < m) std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t start = 0; start < m; start += batch) {
      const std::size_t len = std::min(batch, m - start);
      batch_loss_and_gradient(spec, w_local, data.data,
                              std::span<const std::size_t>(rows).subspan(start, len), grad);
      step();
      if (!all_finite(w_local)) return pseudo;
    }
  }
  return pseudo;
}

double global_loss(const ModelSpec& spec, std::span<const double> w,
                   std::span<const ClientDataset> clients) {
  if (clients.empty()) throw StructureError("global_loss: no clients");
  double acc = 0.0;
  for (const auto& c : clients) acc += local_loss(spec, w, c);
  return acc / static_cast<double>(clients.size());
}

ParamVector global_gradient(const ModelSpec& spec, std::span<const double> w,
                            std::span<const ClientDataset> clients) {
  if (clients.empty()) throw StructureError("global_gradient: no clients");
  ParamVector acc(w.size(), 0.0);
  for (const auto& c : clients) axpy(1.0, local_gradient(spec, w, c), acc);
  const double inv = 1.0 / static_cast<double>(clients.size());
  for (double& v : acc) v *= inv;
  return acc;
}

int predict(const ModelSpec& spec, std::span<const double> w, std::span<const double> x) {
  require_dim(spec, w);
  std::vector<double> z;
  std::visit(Overloaded{
                 [&](const QuadraticModel&) {
                   throw StructureError("quadratic models do not classify");
                 },
                 [&](const LogisticModel& m) {
                   if (x.size() != m.feature_dim) throw StructureError("predict: feature size");
                   z.assign(m.classes, 0.0);
                   for (std::size_t c = 0; c < m.classes; ++c) {
                     double acc = w[m.classes * m.feature_dim + c];
                     for (std::size_t j = 0; j < m.feature_dim; ++j) {
                       acc += w[c * m.feature_dim + j] * x[j];
                     }
                     z[c] = acc;
                   }
                 },
                 [&](const MlpModel& m) {
                   if (x.size() != m.feature_dim) throw StructureError("predict: feature size");
                   const std::size_t p = m.feature_dim, h = m.hidden;
                   std::vector<double> act(h);
                   for (std::size_t u = 0; u < h; ++u) {
                     double acc = w[h * p + u];
                     for (std::size_t j = 0; j < p; ++j) acc += w[u * p + j] * x[j];
                     act[u] = m.activation == Activation::kRelu ? std::max(acc, 0.0)
                                                                : std::tanh(acc);
                   }
                   const std::size_t off2 = h * p + h;
                   z.assign(m.classes, 0.0);
                   for (std::size_t c = 0; c < m.classes; ++c) {
                     double acc = w[off2 + m.classes * h + c];
                     for (std::size_t u = 0; u < h; ++u) acc += w[off2 + c * h + u] * act[u];
                     z[c] = acc;
                   }
                 },
             },
             spec.kind());
  int best = -1;
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (!std::isfinite(z[c])) continue;
    if (best < 0 || z[c] > z[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

void project_to_ball(std::span<double> w, double radius) {
  if (!(radius > 0.0)) throw DomainError("project_to_ball: radius must be > 0");
  const double n = norm2(w);
  if (n > radius) {
    const double s = radius / n;
    for (double& v : w) v *= s;
  }
}

double max_affine_norm_on_ball(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               double radius) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw StructureError("max_affine_norm_on_ball: shape mismatch");
  }
  if (!(radius >= 0.0)) throw DomainError("max_affine_norm_on_ball: radius must be >= 0");
  if (radius == 0.0) return b.norm();

  // Maximise phi(w) = w^T M w - 2 c^T w + |b|^2 on |w| = r with M = A^T A,
  // c = A^T b. The maximiser solves (M - lambda I) w = c with lambda >= lambda_max(M).
  const Eigen::MatrixXd m = a.transpose() * a;
  const Eigen::VectorXd c = a.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd lam = es.eigenvalues();  // ascending
  const Eigen::VectorXd ch = es.eigenvectors().transpose() * c;
  const Eigen::Index d = lam.size();
  const double lam_max = lam(d - 1);
  const double tol = 1e-12 * std::max(1.0, std::abs(lam_max));
  const double c_norm = c.norm();

  double top_mass = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (lam(i) >= lam_max - tol) top_mass += ch(i) * ch(i);
  }

  Eigen::VectorXd wh(d);
  auto phi = [&](const Eigen::VectorXd& v) {
    double val = b.squaredNorm();
    for (Eigen::Index i = 0; i < d; ++i) val += lam(i) * v(i) * v(i) - 2.0 * ch(i) * v(i);
    return std::sqrt(std::max(val, 0.0));
  };

  if (top_mass <= 1e-24 * std::max(1.0, c_norm * c_norm)) {
    // Possible hard case: c has no component along the top eigenspace.
    double rest = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      wh(i) = lam(i) >= lam_max - tol ? 0.0 : ch(i) / (lam(i) - lam_max);
      rest += wh(i) * wh(i);
    }
    if (rest <= radius * radius) {
      Eigen::Index top = d - 1;
      wh(top) = std::sqrt(radius * radius - rest);
      return phi(wh);
    }
  }

  auto norm_sq_at = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double gap = lambda - lam(i);
      s += ch(i) * ch(i) / (gap * gap);
    }
    return s;
  };
  double lo = lam_max;
  double hi = lam_max + c_norm / radius;
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (norm_sq_at(mid) > radius * radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) wh(i) = ch(i) / (lam(i) - hi);
  return phi(wh);
}

SmoothnessInfo compute_smoothness(const ModelSpec& spec, std::span<const ClientDataset> clients,
                                  const SmoothnessOptions& opts) {
  if (clients.empty()) throw StructureError("compute_smoothness: no clients");
  if (!(opts.domain_radius > 0.0)) throw DomainError("compute_smoothness: radius must be > 0");
  SmoothnessInfo info;

  if (const auto* q = std::get_if<QuadraticModel>(&spec.kind())) {
    const auto d = static_cast<Eigen::Index>(spec.dim());
    Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd b_bar = Eigen::VectorXd::Zero(d);
    for (const auto& c : clients) {
      a_bar += client_matrix(*q, c.client_id);
      b_bar += q->b[c.client_id];
    }
    a_bar /= static_cast<double>(clients.size());
    b_bar /= static_cast<double>(clients.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_bar, Eigen::EigenvaluesOnly);
    info.lipschitz = es.eigenvalues().maxCoeff();
    for (const auto& c : clients) {
      info.grad_bound = std::max(info.grad_bound,
                                 max_affine_norm_on_ball(client_matrix(*q, c.client_id),
                                                         q->b[c.client_id], opts.domain_radius));
    }
    const Eigen::VectorXd w_star = a_bar.completeOrthogonalDecomposition().solve(b_bar);
    info.f_star = 0.5 * w_star.dot(a_bar * w_star) - b_bar.dot(w_star);
    info.minimizer = ParamVector(w_star.data(), w_star.data() + w_star.size());
    info.exact = true;
    return info;
  }

  const std::size_t d = spec.dim();
  Rng rng(derive_seed(opts.seed, Stream::kProbe));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_unit = [&] {
    ParamVector v(d);
    for (double& x : v) x = normal(rng);
    const double n = norm2(v);
    for (double& x : v) x /= n;
    return v;
  };

  for (std::size_t probe = 0; probe < opts.n_probes; ++probe) {
    ParamVector w = random_unit();
    const double r = opts.domain_radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
    for (double& x : w) x *= r;

    for (const auto& c : clients) {
      info.grad_bound = std::max(info.grad_bound, norm2(local_gradient(spec, w, c)));
    }

    // Power iteration on central-difference Hessian-vector products.
    ParamVector v = random_unit();
    const double eps = 1e-4;
    double lambda = 0.0;
    for (std::size_t it = 0; it < opts.power_iterations; ++it) {
      ParamVector wp = w, wm = w;
      axpy(eps, v, wp);
      axpy(-eps, v, wm);
      ParamVector hv = global_gradient(spec, wp, clients);
      axpy(-1.0, global_gradient(spec, wm, clients), hv);
      for (double& x : hv) x /= 2.0 * eps;
      lambda = norm2(hv);
      if (lambda == 0.0) break;
      for (std::size_t i = 0; i < d; ++i) v[i] = hv[i] / lambda;
    }
    info.lipschitz = std::max(info.lipschitz, lambda);
  }

  // f_star: best loss along a long noiseless full-gradient run.
  Rng init_rng(derive_seed(opts.seed, Stream::kInit));
  ParamVector w = initial_parameters(spec, init_rng);
  const double step = info.lipschitz > 0.0 ? 1.0 / info.lipschitz : 1.0;
  info.f_star = global_loss(spec, w, clients);
  for (std::size_t k = 0; k < opts.f_star_steps; ++k) {
    axpy(-step, global_gradient(spec, w, clients), w);
    info.f_star = std::min(info.f_star, global_loss(spec, w, clients));
  }
  info.exact = false;
  return info;
}

}  // namespace otafl
