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

// Desk-scale models with hand-derived gradients.
//
//   Quadratic  f_n(w) = 1/2 w^T A_n w - b_n^T w      (per-client A_n, b_n)
//   Logistic   softmax regression, mean cross-entropy
//   Mlp        one hidden layer (ReLU or tanh), softmax output
//
// Parameter layouts (row-major weights):
//   Logistic  [W (classes x p) | bias (classes)]
//   Mlp       [W1 (hidden x p) | b1 (hidden) | W2 (classes x hidden) | b2 (classes)]
// and the block layout lists exactly those segments.

#ifndef OTAFL_MODELS_HPP_
#define OTAFL_MODELS_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "otafl/data.hpp"
#include "otafl/types.hpp"

namespace otafl {

struct QuadraticModel {
  std::vector<Eigen::MatrixXd> a;  // one symmetric PSD matrix per client
  std::vector<Eigen::VectorXd> b;
};

struct LogisticModel {
  std::size_t feature_dim = 0;
  std::size_t classes = 2;
};

enum class Activation { kRelu, kTanh };

struct MlpModel {
  std::size_t feature_dim = 0;
  std::size_t hidden = 32;
  std::size_t classes = 2;
  Activation activation = Activation::kRelu;
};

class ModelSpec {
 public:
  using Kind = std::variant<QuadraticModel, LogisticModel, MlpModel>;

  /// Validates the model and derives its block layout.
  explicit ModelSpec(Kind kind);

  const Kind& kind() const { return kind_; }
  const BlockLayout& block_layout() const { return layout_; }
  std::size_t dim() const { return layout_size(layout_); }
  bool is_quadratic() const { return std::holds_alternative<QuadraticModel>(kind_); }
  bool is_classifier() const { return !is_quadratic(); }
  std::string name() const;

 private:
  Kind kind_;
  BlockLayout layout_;
};

ModelSpec make_quadratic(std::vector<Eigen::MatrixXd> a, std::vector<Eigen::VectorXd> b);
ModelSpec make_logistic(std::size_t feature_dim, std::size_t classes);
ModelSpec make_mlp(std::size_t feature_dim, std::size_t hidden, std::size_t classes,
                   Activation activation = Activation::kRelu);

/// Zeros for Quadratic and Logistic; scaled-uniform weights for Mlp.
ParamVector initial_parameters(const ModelSpec& spec, Rng& rng);

/// f_n(w). Sample models average over the client's samples.
double local_loss(const ModelSpec& spec, std::span<const double> w, const ClientDataset& data);

/// grad f_n(w).
ParamVector local_gradient(const ModelSpec& spec, std::span<const double> w,
                           const ClientDataset& data);

/// Loss and gradient over the given rows (sample models only).
double batch_loss_and_gradient(const ModelSpec& spec, std::span<const double> w,
                               const Dataset& data, std::span<const std::size_t> rows,
                               std::span<double> grad);

struct LocalTrainConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 0;  // 0 = full batch
  double local_lr = 0.03;
  double server_lr = 0.03;  // eta, divides the accumulated delta
};

/// Runs `epochs` passes of mini-batch descent from w and returns the
/// pseudo-gradient (w - w_local) / server_lr, accumulated as
/// sum_t (local_lr / server_lr) grad_t. With one full-batch epoch and
/// local_lr == server_lr this is bit-identical to local_gradient.
/// Quadratic clients take one full-gradient step per epoch.
ParamVector local_update(const ModelSpec& spec, std::span<const double> w,
                         const ClientDataset& data, const LocalTrainConfig& cfg, Rng& rng);

/// Equal-weight federated objective f = (1/N) sum_n f_n and its gradient.
double global_loss(const ModelSpec& spec, std::span<const double> w,
                   std::span<const ClientDataset> clients);
ParamVector global_gradient(const ModelSpec& spec, std::span<const double> w,
                            std::span<const ClientDataset> clients);

/// Arg-max class; non-finite scores never win and an all non-finite row
/// predicts -1.
int predict(const ModelSpec& spec, std::span<const double> w, std::span<const double> x);

struct SmoothnessInfo {
  double lipschitz = 0.0;    // L
  double grad_bound = 0.0;   // G
  double f_star = 0.0;       // lower bound on f
  bool exact = false;        // false: sampled estimates
  std::optional<ParamVector> minimizer;  // exact w* for Quadratic
};

struct SmoothnessOptions {
  double domain_radius = 1.0;  // |w| <= r
  std::size_t n_probes = 1000;
  std::size_t power_iterations = 20;
  std::size_t f_star_steps = 500;
  std::uint64_t seed = 0;
};

/// Quadratic: L = lambda_max(mean A_n), G = max_n sup_{|w|<=r} |A_n w - b_n|,
/// f_star = f(w*). Other models: L from Hessian power iteration at sampled w
/// in the ball, G as the largest sampled client gradient norm, f_star from a
/// long noiseless descent run.
SmoothnessInfo compute_smoothness(const ModelSpec& spec, std::span<const ClientDataset> clients,
                                  const SmoothnessOptions& opts = {});

/// sup_{|w| <= r} |A w - b| for symmetric A, solved exactly through the
/// eigen-decomposition of A^2 and a secular equation.
double max_affine_norm_on_ball(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double radius);

/// Euclidean projection onto the ball of radius r centred at the origin.
void project_to_ball(std::span<double> w, double radius);

}  // namespace otafl

#endif  // OTAFL_MODELS_HPP_
