// Copyright 2026 The blearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BL_TRAINING_HPP_
#define BL_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bl/gibbs.hpp"
#include "bl/network.hpp"
#include "bl/parallel.hpp"

namespace bl {

// One observation. `label` indexes the discrete response (-1 if absent), `y`
// holds the continuous response, `id` keys the per-sample noise stream.
struct Example {
  std::vector<double> x;
  int label = -1;
  std::vector<double> y;
  std::uint64_t id = 0;
};

struct LossConfig {
  double gamma_d = 1.0;
  double gamma_c = 0.0;
  double sigma = 0.1;
  // Multiplies the score-matching term by 1/(2 sigma^2).
  bool dsm_prefactor = false;

  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  NetworkGradient grad;  // empty when not requested
};

// Mean -log p_tau(label | x) over the batch.
LossResult ce_loss(const GibbsModel& model, std::span<const Example> batch,
                   Exec exec = Exec::kParallel, bool want_grad = true);

// Mean || grad_y BL(x, y~) / tau + (y~ - y) / sigma^2 ||^2 with
// y~ = y + sigma * eps, eps drawn from the stream keyed by (noise_seed, id).
LossResult dsm_loss(const GibbsModel& model, const LossConfig& cfg, std::span<const Example> batch,
                    std::uint64_t noise_seed, Exec exec = Exec::kParallel, bool want_grad = true);

// gamma_d * ce + gamma_c * dsm; a zero weight skips its term.
LossResult hybrid_loss(const GibbsModel& model, const LossConfig& cfg,
                       std::span<const Example> batch, std::uint64_t noise_seed,
                       Exec exec = Exec::kParallel, bool want_grad = true);

// Scales g in place so that ||g||_2 <= max_norm. Returns the pre-clip norm.
double clip_global_norm(std::span<double> g, double max_norm);

enum class OptimizerKind { kSgd, kAdam, kAdamW };
std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

// SGD, or the adaptive-moment method (beta = (0.9, 0.999), eps = 1e-8) with
// weight decay either added to the gradient (kAdam) or applied to the
// parameters directly (kAdamW).
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double weight_decay, std::size_t n_params);

  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps_taken() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double wd_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

enum class Monitor { kValLoss, kQuadratureNll };

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t batch_size = 64;
  std::size_t epochs = 100;
  double max_grad_norm = 1.0;
  double weight_decay = 0.0;
  std::size_t patience = 20;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  Monitor monitor = Monitor::kValLoss;
  QuadratureGrid quadrature;  // used by Monitor::kQuadratureNll
  Exec exec = Exec::kParallel;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_metric = 0.0;  // accuracy with a discrete response, else the monitored value
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

// Trains in place; the best-validation parameters are restored at the end.
TrainResult train(GibbsModel& model, std::span<const Example> train_set,
                  std::span<const Example> val_set, const LossConfig& loss_cfg,
                  const TrainConfig& train_cfg);

// Accuracy of argmax class_probs against labels.
double accuracy(const GibbsModel& model, std::span<const Example> data);

// Mean -log p(y | x) with quadrature normalization (continuous y, dim <= 2).
double quadrature_nll(const GibbsModel& model, std::span<const Example> data,
                      const QuadratureGrid& grid);

// Worst relative error between analytic gradients of the hybrid loss and
// central differences at steps h and h/2 combined by Richardson extrapolation.
// Error per parameter is |a - f| / max(|a|, |f|), or |a - f| when both are
// below abs_floor.
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};
GradCheckResult finite_diff_check_detail(const GibbsModel& model, const LossConfig& cfg,
                                         std::span<const Example> batch, double h,
                                         std::uint64_t noise_seed = 0, double abs_floor = 1e-9);
double finite_diff_check(const GibbsModel& model, const LossConfig& cfg,
                         std::span<const Example> batch, double h, std::uint64_t noise_seed = 0);

}  // namespace bl

#endif  // BL_TRAINING_HPP_
