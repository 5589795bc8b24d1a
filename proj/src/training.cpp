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

#include "bl/training.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>

#include "bl/dual.hpp"
#include "bl/error.hpp"
#include "bl/rng.hpp"

namespace bl {

void LossConfig::validate() const {
  if (!(gamma_d >= 0.0) || !(gamma_c >= 0.0)) throw ConfigError("loss.gamma_d/gamma_c must be >= 0");
  if (!(gamma_d + gamma_c > 0.0)) throw ConfigError("loss needs gamma_d + gamma_c > 0");
  if (!(sigma > 0.0)) throw ConfigError("loss.sigma must be positive");
}

namespace {

struct SampleWorkspace {
  NetworkWorkspace<double> wd;
  NetworkWorkspace<Dual> wdual;
  std::vector<double> z;
  std::vector<Dual> zd;
  std::vector<Dual> dpd;
  std::vector<double> score;
  std::vector<double> up;
};

// Evaluates fn(i, grad_row, ws) -> loss for every sample; the mean loss and
// mean gradient are reduced pairwise in index order.
template <class Fn>
LossResult reduce_batch(std::size_t n, std::size_t n_params, bool want_grad, Exec exec, Fn fn) {
  if (n == 0) throw ShapeError("empty batch");
  std::vector<double> losses(n, 0.0);
  std::vector<double> rows(want_grad ? n * n_params : 0, 0.0);
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&](std::size_t i, SampleWorkspace& ws) {
    std::span<double> row;
    if (want_grad) row = std::span<double>(rows).subspan(i * n_params, n_params);
    try {
      losses[i] = fn(i, row, ws);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::kSerial) {
    SampleWorkspace ws;
    for (std::size_t i = 0; i < n; ++i) run(i, ws);
  } else {
#pragma omp parallel
    {
      SampleWorkspace ws;
#pragma omp for schedule(static)
      for (std::size_t i = 0; i < n; ++i) run(i, ws);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  LossResult r;
  const double inv = 1.0 / static_cast<double>(n);
  r.loss = pairwise_sum(losses) * inv;
  if (want_grad) {
    r.grad.assign(n_params, 0.0);
    pairwise_row_sum(rows, n_params, r.grad);
    for (double& g : r.grad) g *= inv;
  }
  return r;
}

void check_label(const Network& net, const Example& ex) {
  const std::size_t m = net.spec().n_classes;
  if (m < 2) throw ModeError("cross-entropy needs a discrete response");
  if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= m) {
    throw ShapeError("label " + std::to_string(ex.label) + " out of range [0, " +
                     std::to_string(m) + ")");
  }
}

// Writes [x; e_k; y] into z.
void stacked_input(const Network& net, const Example& ex, std::size_t k, std::span<const double> y,
                   std::vector<double>& z) {
  const auto& spec = net.spec();
  z.assign(net.input_dim(), 0.0);
  std::copy(ex.x.begin(), ex.x.end(), z.begin());
  z[spec.x_dim + k] = 1.0;
  std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(spec.x_dim + spec.n_classes));
}

double ce_sample(const GibbsModel& model, const Example& ex, std::span<double> row,
                 SampleWorkspace& ws) {
  const Network& net = model.net;
  check_label(net, ex);
  if (ex.x.size() != net.x_dim()) throw ShapeError("example x length mismatch");
  const std::size_t m = net.spec().n_classes;
  const double tau = model.tau;
  std::vector<double> u(m);
  if (net.mode() == OutputMode::kClassVector) {
    ws.z.assign(ex.x.begin(), ex.x.end());
    network_forward<double>(net, ws.z, ws.wd);
    u = ws.wd.out;
  } else {
    if (ex.y.size() != net.spec().y_dim) throw ShapeError("example y length mismatch");
    for (std::size_t k = 0; k < m; ++k) {
      stacked_input(net, ex, k, ex.y, ws.z);
      network_forward<double>(net, ws.z, ws.wd);
      u[k] = ws.wd.out[0];
    }
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : u) mx = std::max(mx, v / tau);
  std::vector<double> e(m);
  for (std::size_t k = 0; k < m; ++k) e[k] = std::exp(u[k] / tau - mx);
  const double lse = mx + std::log(pairwise_sum(e));
  const auto y = static_cast<std::size_t>(ex.label);
  const double loss = lse - u[y] / tau;
  if (row.empty()) return loss;

  ws.up.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    ws.up[k] = (std::exp(u[k] / tau - lse) - (k == y ? 1.0 : 0.0)) / tau;
  }
  if (net.mode() == OutputMode::kClassVector) {
    network_backward<double>(net, ws.wd, ws.up, row, false);
  } else {
    for (std::size_t k = 0; k < m; ++k) {
      stacked_input(net, ex, k, ex.y, ws.z);
      network_forward<double>(net, ws.z, ws.wd);
      network_backward<double>(net, ws.wd, std::span<const double>(&ws.up[k], 1), row, false);
    }
  }
  return loss;
}

double dsm_sample(const GibbsModel& model, const LossConfig& cfg, const Example& ex,
                  std::uint64_t noise_seed, std::span<double> row, SampleWorkspace& ws) {
  const Network& net = model.net;
  const auto& spec = net.spec();
  if (net.mode() != OutputMode::kScalar || spec.y_dim == 0) {
    throw ModeError("score matching needs a scalar-energy network with a continuous response");
  }
  if (ex.x.size() != net.x_dim()) throw ShapeError("example x length mismatch");
  if (ex.y.size() != spec.y_dim) throw ShapeError("example y length mismatch");
  const std::size_t yd = spec.y_dim;
  const std::size_t y0 = spec.x_dim + spec.n_classes;
  NormalStream normal(stream_key(noise_seed, {ex.id}));
  std::vector<double> eps(yd);
  for (double& v : eps) v = normal();

  ws.z.assign(net.input_dim(), 0.0);
  std::copy(ex.x.begin(), ex.x.end(), ws.z.begin());
  if (spec.n_classes > 0) {
    check_label(net, ex);
    ws.z[spec.x_dim + static_cast<std::size_t>(ex.label)] = 1.0;
  }
  for (std::size_t k = 0; k < yd; ++k) ws.z[y0 + k] = ex.y[k] + cfg.sigma * eps[k];

  ws.score.resize(net.response_dim());
  score_into(net, ws.z, ws.wd, ws.score);
  std::vector<double> r(yd);
  double sq = 0.0;
  for (std::size_t k = 0; k < yd; ++k) {
    const double s = ws.score[spec.n_classes + k];
    if (!std::isfinite(s)) throw NumericError("non-finite score in score matching");
    r[k] = s / model.tau + eps[k] / cfg.sigma;
    sq += r[k] * r[k];
  }
  const double scale = cfg.dsm_prefactor ? 1.0 / (2.0 * cfg.sigma * cfg.sigma) : 1.0;
  if (row.empty()) return scale * sq;

  ws.zd.assign(ws.z.begin(), ws.z.end());
  for (std::size_t k = 0; k < yd; ++k) ws.zd[y0 + k].tan = r[k];
  network_forward<Dual>(net, ws.zd, ws.wdual);
  ws.dpd.assign(net.param_count(), Dual{});
  const Dual one(1.0);
  network_backward<Dual>(net, ws.wdual, std::span<const Dual>(&one, 1), ws.dpd, false);
  const double f = scale * 2.0 / model.tau;
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = f * ws.dpd[i].tan;
  return scale * sq;
}

}  // namespace

LossResult ce_loss(const GibbsModel& model, std::span<const Example> batch, Exec exec,
                   bool want_grad) {
  return reduce_batch(batch.size(), model.net.param_count(), want_grad, exec,
                      [&](std::size_t i, std::span<double> row, SampleWorkspace& ws) {
                        return ce_sample(model, batch[i], row, ws);
                      });
}

LossResult dsm_loss(const GibbsModel& model, const LossConfig& cfg, std::span<const Example> batch,
                    std::uint64_t noise_seed, Exec exec, bool want_grad) {
  if (!(cfg.sigma > 0.0)) throw ConfigError("loss.sigma must be positive");
  return reduce_batch(batch.size(), model.net.param_count(), want_grad, exec,
                      [&](std::size_t i, std::span<double> row, SampleWorkspace& ws) {
                        return dsm_sample(model, cfg, batch[i], noise_seed, row, ws);
                      });
}

LossResult hybrid_loss(const GibbsModel& model, const LossConfig& cfg,
                       std::span<const Example> batch, std::uint64_t noise_seed, Exec exec,
                       bool want_grad) {
  cfg.validate();
  const auto& spec = model.net.spec();
  if (cfg.gamma_d > 0.0) {
    if (spec.n_classes < 2) throw ConfigError("loss.gamma_d > 0 but the model has no classes");
    for (const Example& ex : batch) {
      if (ex.label < 0) throw ConfigError("loss.gamma_d > 0 but an example has no label");
    }
  }
  if (cfg.gamma_c > 0.0) {
    if (spec.y_dim == 0) throw ConfigError("loss.gamma_c > 0 but the model has no continuous response");
    for (const Example& ex : batch) {
      if (ex.y.empty()) throw ConfigError("loss.gamma_c > 0 but an example has no continuous target");
    }
  }
  if (cfg.gamma_c == 0.0) {
    LossResult r = ce_loss(model, batch, exec, want_grad);
    if (cfg.gamma_d != 1.0) {
      r.loss *= cfg.gamma_d;
      for (double& g : r.grad) g *= cfg.gamma_d;
    }
    return r;
  }
  if (cfg.gamma_d == 0.0) {
    LossResult r = dsm_loss(model, cfg, batch, noise_seed, exec, want_grad);
    if (cfg.gamma_c != 1.0) {
      r.loss *= cfg.gamma_c;
      for (double& g : r.grad) g *= cfg.gamma_c;
    }
    return r;
  }
  const LossResult a = ce_loss(model, batch, exec, want_grad);
  const LossResult b = dsm_loss(model, cfg, batch, noise_seed, exec, want_grad);
  LossResult r;
  r.loss = cfg.gamma_d * a.loss + cfg.gamma_c * b.loss;
  if (want_grad) {
    r.grad.resize(a.grad.size());
    for (std::size_t i = 0; i < r.grad.size(); ++i) {
      r.grad[i] = cfg.gamma_d * a.grad[i] + cfg.gamma_c * b.grad[i];
    }
  }
  return r;
}

double clip_global_norm(std::span<double> g, double max_norm) {
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sq[i] = g[i] * g[i];
  const double norm = std::sqrt(pairwise_sum(sq));
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (double& v : g) v *= s;
  }
  return norm;
}

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kSgd:
      return "sgd";
    case OptimizerKind::kAdam:
      return "adam";
    case OptimizerKind::kAdamW:
      return "adamw";
  }
  return "adam";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam" || s == "adaptive_moment") return OptimizerKind::kAdam;
  if (s == "adamw" || s == "adaptive_moment_decoupled") return OptimizerKind::kAdamW;
  throw ConfigError("unknown optimizer '" + s + "' (expected sgd, adam or adamw)");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double weight_decay,
                     std::size_t n_params)
    : kind_(kind), lr_(learning_rate), wd_(weight_decay) {
  if (kind_ != OptimizerKind::kSgd) {
    m_.assign(n_params, 0.0);
    v_.assign(n_params, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++t_;
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * (grad[i] + wd_ * params[i]);
    return;
  }
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grad[i];
    if (kind_ == OptimizerKind::kAdam && wd_ != 0.0) g += wd_ * params[i];
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    if (kind_ == OptimizerKind::kAdamW && wd_ != 0.0) params[i] -= lr_ * wd_ * params[i];
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("train.learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
  if (!(max_grad_norm > 0.0)) throw ConfigError("train.max_grad_norm must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be >= 0");
  if (monitor == Monitor::kQuadratureNll && quadrature.points_per_dim < 16) {
    throw ConfigError("quadrature monitor needs train.quadrature with >= 16 points");
  }
}

double accuracy(const GibbsModel& model, std::span<const Example> data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Example& ex : data) {
    const auto p = class_probs(model, ex.x, model.net.mode() == OutputMode::kScalar
                                                ? std::span<const double>(ex.y)
                                                : std::span<const double>());
    const auto k = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    hits += k == ex.label ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double quadrature_nll(const GibbsModel& model, std::span<const Example> data,
                      const QuadratureGrid& grid) {
  if (data.empty()) return 0.0;
  std::vector<double> v(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    v[i] = -quadrature_log_density(model, data[i].x, data[i].y, grid);
  }
  return pairwise_sum(v) / static_cast<double>(v.size());
}

TrainResult train(GibbsModel& model, std::span<const Example> train_set,
                  std::span<const Example> val_set, const LossConfig& loss_cfg,
                  const TrainConfig& cfg) {
  loss_cfg.validate();
  cfg.validate();
  if (train_set.empty() || val_set.empty()) throw ConfigError("training needs nonempty train and validation splits");
  Network& net = model.net;
  Optimizer opt(cfg.optimizer, cfg.learning_rate, cfg.weight_decay, net.param_count());
  const bool has_classes = net.spec().n_classes >= 2;
  const std::uint64_t val_noise = stream_key(cfg.seed, {0x7a1});

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Example> batch;
  std::vector<double> best(net.params().begin(), net.params().end());
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  TrainResult result;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::mt19937_64 shuffler(stream_key(cfg.seed, {0x5bf1, epoch}));
    std::shuffle(order.begin(), order.end(), shuffler);
    const std::uint64_t noise_seed = stream_key(cfg.seed, {0xd5a, epoch});
    std::vector<double> weighted;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
      LossResult r = hybrid_loss(model, loss_cfg, batch, noise_seed, cfg.exec, true);
      if (!std::isfinite(r.loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
      }
      weighted.push_back(r.loss * static_cast<double>(end - start));
      clip_global_norm(r.grad, cfg.max_grad_norm);
      opt.step(net.params(), r.grad);
      net.project_lambdas();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = pairwise_sum(weighted) / static_cast<double>(order.size());
    rec.val_loss = hybrid_loss(model, loss_cfg, val_set, val_noise, cfg.exec, false).loss;
    double monitored = rec.val_loss;
    if (cfg.monitor == Monitor::kQuadratureNll) monitored = quadrature_nll(model, val_set, cfg.quadrature);
    rec.val_metric = has_classes ? accuracy(model, val_set) : monitored;
    result.history.push_back(rec);

    if (!std::isfinite(monitored)) {
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    if (monitored < best_score) {
      best_score = monitored;
      result.best_epoch = epoch;
      std::copy(net.params().begin(), net.params().end(), best.begin());
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  std::copy(best.begin(), best.end(), net.params().begin());
  return result;
}

GradCheckResult finite_diff_check_detail(const GibbsModel& model, const LossConfig& cfg,
                                         std::span<const Example> batch, double h,
                                         std::uint64_t noise_seed, double abs_floor) {
  const LossResult analytic = hybrid_loss(model, cfg, batch, noise_seed, Exec::kSerial, true);
  GibbsModel probe = model;
  auto p = probe.net.params();
  GradCheckResult out;
  // central difference over the representable step actually taken
  const auto central = [&](std::size_t i, double step) {
    const double saved = p[i];
    const double hi = saved + step, lo = saved - step;
    p[i] = hi;
    const double up = hybrid_loss(probe, cfg, batch, noise_seed, Exec::kSerial, false).loss;
    p[i] = lo;
    const double down = hybrid_loss(probe, cfg, batch, noise_seed, Exec::kSerial, false).loss;
    p[i] = saved;
    return (up - down) / (hi - lo);
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    // Richardson step: cancels the h^2 truncation term
    const double numeric = (4.0 * central(i, 0.5 * h) - central(i, h)) / 3.0;
    const double a = analytic.grad[i];
    const double scale = std::max(std::abs(a), std::abs(numeric));
    const double err = scale < abs_floor ? std::abs(a - numeric) : std::abs(a - numeric) / scale;
    if (i == 0 || err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_index = i;
      out.analytic = a;
      out.numeric = numeric;
    }
  }
  return out;
}

double finite_diff_check(const GibbsModel& model, const LossConfig& cfg,
                         std::span<const Example> batch, double h, std::uint64_t noise_seed) {
  return finite_diff_check_detail(model, cfg, batch, h, noise_seed).max_rel_error;
}

}  // namespace bl
