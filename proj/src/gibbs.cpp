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

#include "bl/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "bl/error.hpp"
#include "bl/rng.hpp"

namespace bl {

GibbsModel::GibbsModel(Network n, double t) : net(std::move(n)), tau(t) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("temperature tau must be positive");
}

std::vector<double> class_utilities(const Network& net, std::span<const double> x,
                                    std::span<const double> y_cont) {
  const auto& spec = net.spec();
  if (net.mode() == OutputMode::kClassVector) {
    if (!y_cont.empty()) throw ShapeError("class-vector mode takes no continuous response");
    return forward(net, x, {});
  }
  if (spec.n_classes < 2) throw ModeError("network has no discrete response");
  if (y_cont.size() != spec.y_dim) throw ShapeError("continuous response length mismatch");
  std::vector<double> y(net.response_dim(), 0.0);
  std::copy(y_cont.begin(), y_cont.end(), y.begin() + static_cast<std::ptrdiff_t>(spec.n_classes));
  std::vector<double> u(spec.n_classes);
  for (std::size_t k = 0; k < spec.n_classes; ++k) {
    y[k] = 1.0;
    u[k] = forward(net, x, y)[0];
    y[k] = 0.0;
  }
  return u;
}

std::vector<double> softmax_tempered(std::span<const double> utilities, double tau) {
  if (utilities.empty()) throw ShapeError("softmax of an empty vector");
  double mx = -std::numeric_limits<double>::infinity();
  for (double u : utilities) {
    if (!std::isfinite(u)) throw NumericError("non-finite class utility");
    mx = std::max(mx, u);
  }
  std::vector<double> p(utilities.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp((utilities[k] - mx) / tau);
  const double z = pairwise_sum(p);
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> class_probs(const GibbsModel& model, std::span<const double> x,
                                std::span<const double> y_cont) {
  return softmax_tempered(class_utilities(model.net, x, y_cont), model.tau);
}

namespace {

void check_continuous_response(const Network& net, std::size_t max_dim) {
  if (net.mode() != OutputMode::kScalar) throw ModeError("requires scalar-energy output mode");
  if (net.spec().n_classes != 0) throw ModeError("requires a purely continuous response");
  if (net.spec().y_dim > max_dim) {
    throw UnsupportedError("partition quadrature supports at most 2 response dimensions, got " +
                           std::to_string(net.spec().y_dim));
  }
}

double trapezoid_weight(std::size_t i, std::size_t n, double h) {
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

}  // namespace

double log_partition_quadrature(const GibbsModel& model, std::span<const double> x,
                                std::span<const double> lo, std::span<const double> hi,
                                std::size_t points_per_dim, Exec exec) {
  const Network& net = model.net;
  check_continuous_response(net, 2);
  const std::size_t d = net.spec().y_dim;
  if (lo.size() != d || hi.size() != d) throw ShapeError("quadrature bounds length mismatch");
  if (points_per_dim < 16) throw ConfigError("quadrature needs at least 16 points per dimension");
  for (std::size_t k = 0; k < d; ++k) {
    if (!(lo[k] < hi[k])) throw ConfigError("quadrature bounds need lo < hi");
  }
  const std::size_t n = points_per_dim;
  const std::size_t total = d == 1 ? n : n * n;
  std::vector<double> h(d);
  for (std::size_t k = 0; k < d; ++k) h[k] = (hi[k] - lo[k]) / static_cast<double>(n - 1);

  std::vector<double> energy(total);
  std::vector<double> logw(total);
  std::exception_ptr error;
  const auto zx = net.assemble_input(x, std::vector<double>(d, 0.0));
  const auto eval_node = [&](std::size_t idx, NetworkWorkspace<double>& ws, std::vector<double>& z) {
    std::size_t rem = idx;
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t i = rem % n;
      rem /= n;
      z[net.x_dim() + k] = lo[k] + static_cast<double>(i) * h[k];
      w *= trapezoid_weight(i, n, h[k]);
    }
    network_forward<double>(net, z, ws);
    energy[idx] = ws.out[0] / model.tau;
    logw[idx] = std::log(w);
  };

  if (exec == Exec::kSerial) {
    NetworkWorkspace<double> ws;
    std::vector<double> z = zx;
    for (std::size_t idx = 0; idx < total; ++idx) eval_node(idx, ws, z);
  } else {
#pragma omp parallel
    {
      NetworkWorkspace<double> ws;
      std::vector<double> z = zx;
#pragma omp for schedule(static)
      for (std::size_t idx = 0; idx < total; ++idx) {
        try {
          eval_node(idx, ws, z);
        } catch (...) {
#pragma omp critical
          if (!error) error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
  }

  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total; ++i) mx = std::max(mx, energy[i] + logw[i]);
  std::vector<double> terms(total);
  for (std::size_t i = 0; i < total; ++i) terms[i] = std::exp(energy[i] + logw[i] - mx);
  return mx + std::log(pairwise_sum(terms));
}

double quadrature_log_density(const GibbsModel& model, std::span<const double> x,
                              std::span<const double> y, const QuadratureGrid& grid) {
  const double log_z =
      log_partition_quadrature(model, x, grid.lo, grid.hi, grid.points_per_dim, Exec::kSerial);
  return forward(model.net, x, y)[0] / model.tau - log_z;
}

GridDensity gibbs_density_1d(const GibbsModel& model, std::span<const double> x, double lo,
                             double hi, std::size_t points) {
  check_continuous_response(model.net, 1);
  if (model.net.spec().y_dim != 1) throw UnsupportedError("gibbs_density_1d needs y_dim = 1");
  const double log_z = log_partition_quadrature(model, x, std::span<const double>(&lo, 1),
                                                std::span<const double>(&hi, 1), points,
                                                Exec::kSerial);
  GridDensity g;
  g.nodes.resize(points);
  g.density.resize(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double y = lo + static_cast<double>(i) * h;
    g.nodes[i] = y;
    g.density[i] = std::exp(forward(model.net, x, std::span<const double>(&y, 1))[0] / model.tau -
                            log_z);
  }
  return g;
}

void LangevinConfig::validate() const {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("langevin step_size must be nonnegative");
  }
  if (n_chains < 1) throw ConfigError("langevin needs at least one chain");
  if (burn_in >= n_steps && n_steps > 0) throw ConfigError("langevin burn_in must be < n_steps");
  if (!(init_scale >= 0.0)) throw ConfigError("langevin init_scale must be nonnegative");
}

namespace {

// Runs one chain to completion. Returns the failing step index or npos.
std::size_t run_chain(const GibbsModel& model, std::span<const double> x, const LangevinConfig& cfg,
                      std::size_t chain, std::span<double> y, NetworkWorkspace<double>& ws,
                      std::vector<double>& z, std::vector<double>& score) {
  constexpr std::size_t kOk = static_cast<std::size_t>(-1);
  const Network& net = model.net;
  const std::size_t xd = net.x_dim();
  const std::size_t d = y.size();
  NormalStream noise(stream_key(cfg.seed, {0x1a6e, chain}));
  for (std::size_t k = 0; k < d; ++k) y[k] = cfg.init_scale * noise();
  std::copy(x.begin(), x.end(), z.begin());
  const double drift = cfg.step_size / model.tau;
  const double kick = cfg.zero_noise ? 0.0 : std::sqrt(2.0 * cfg.step_size * model.tau);
  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(xd));
    try {
      score_into(net, z, ws, score);
    } catch (const NumericError&) {
      return step;
    }
    double norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double xi = cfg.zero_noise ? 0.0 : noise();
      y[k] += drift * score[k] + kick * xi;
      norm2 += y[k] * y[k];
    }
    if (!std::isfinite(norm2) || norm2 > kDivergenceNorm * kDivergenceNorm) return step;
  }
  return kOk;
}

}  // namespace

Matrix langevin_sample_batch(const GibbsModel& model, const Matrix& xs, const LangevinConfig& cfg,
                             Exec exec) {
  cfg.validate();
  const Network& net = model.net;
  check_continuous_response(net, std::numeric_limits<std::size_t>::max());
  if (xs.rows != cfg.n_chains || xs.cols != net.x_dim()) {
    throw ShapeError("langevin conditioning matrix must be n_chains x x_dim");
  }
  const std::size_t d = net.response_dim();
  Matrix out(cfg.n_chains, d);
  std::vector<std::size_t> failed(cfg.n_chains, static_cast<std::size_t>(-1));
  const std::size_t zdim = net.input_dim();

  if (exec == Exec::kSerial) {
    NetworkWorkspace<double> ws;
    std::vector<double> z(zdim), score(d);
    for (std::size_t c = 0; c < cfg.n_chains; ++c) {
      failed[c] = run_chain(model, xs.row(c), cfg, c, out.row(c), ws, z, score);
    }
  } else {
#pragma omp parallel
    {
      NetworkWorkspace<double> ws;
      std::vector<double> z(zdim), score(d);
#pragma omp for schedule(dynamic, 4)
      for (std::size_t c = 0; c < cfg.n_chains; ++c) {
        failed[c] = run_chain(model, xs.row(c), cfg, c, out.row(c), ws, z, score);
      }
    }
  }
  std::size_t worst_chain = 0;
  std::size_t first_step = static_cast<std::size_t>(-1);
  for (std::size_t c = 0; c < cfg.n_chains; ++c) {
    if (failed[c] < first_step) {
      first_step = failed[c];
      worst_chain = c;
    }
  }
  if (first_step != static_cast<std::size_t>(-1)) throw DivergenceError(first_step, worst_chain);
  return out;
}

Matrix langevin_sample(const GibbsModel& model, std::span<const double> x,
                       const LangevinConfig& cfg, Exec exec) {
  if (x.size() != model.net.x_dim()) throw ShapeError("x length mismatch");
  Matrix xs(cfg.n_chains, x.size());
  for (std::size_t c = 0; c < cfg.n_chains; ++c) std::copy(x.begin(), x.end(), xs.row(c).begin());
  return langevin_sample_batch(model, xs, cfg, exec);
}

std::string to_string(ResidualScale s) { return s == ResidualScale::kSum ? "sum" : "mean"; }

ResidualScale residual_scale_from_string(const std::string& s) {
  if (s == "sum") return ResidualScale::kSum;
  if (s == "mean") return ResidualScale::kMean;
  throw ConfigError("unknown residual scale '" + s + "' (expected sum or mean)");
}

Network penalty_network(std::size_t dim, double lambda, ResidualScale scale) {
  if (dim < 1) throw ConfigError("constraint diagnostic needs dim >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("penalty weight lambda must be nonnegative");
  NetworkSpec spec;
  spec.x_dim = dim;
  spec.y_dim = dim;
  spec.mode = OutputMode::kScalar;
  spec.style = HeadStyle::kIBL;
  spec.restrict_y = false;  // the residual carries -|x|^2
  LayerArch layer;
  layer.width = 1;
  layer.u.rank = 0;
  layer.c.rank = 0;
  layer.t.rank = 1;
  layer.t.degree = 0;
  for (std::size_t k = 0; k < 2 * dim; ++k) {
    Exponent e(2 * dim, 0);
    e[k] = 2;
    layer.t.extra.push_back(e);
  }
  spec.layers.push_back(layer);
  Network net(spec);
  const BlockShape& shape = net.block_shape(0);
  auto bp = net.block_params(0, 0);
  bp[shape.lambda_offset(Head::kT)] = lambda;
  const MonomialBasis& basis = *shape.head(Head::kT).basis;
  const double unit = scale == ResidualScale::kSum ? 1.0 : 1.0 / static_cast<double>(dim);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& e = basis.exponents()[j];
    const bool is_y = std::find(e.begin() + static_cast<std::ptrdiff_t>(dim), e.end(), 2) != e.end();
    bp[shape.coeff_offset(Head::kT) + j] = is_y ? unit : -unit;
  }
  net.readout_weight()[0] = 1.0;
  return net;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw ShapeError("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

ViolationStats constraint_diagnostic(std::size_t dim, double lambda, double tau,
                                     const LangevinConfig& cfg, double epsilon_tol,
                                     ResidualScale scale, Exec exec) {
  if (!(epsilon_tol > 0.0)) throw ConfigError("epsilon_tol must be positive");
  GibbsModel model(penalty_network(dim, lambda, scale), tau);
  Matrix xs(cfg.n_chains, dim);
  for (std::size_t c = 0; c < cfg.n_chains; ++c) {
    NormalStream normal(stream_key(cfg.seed, {0x0c0d, c}));
    for (double& v : xs.row(c)) v = normal();
  }
  const Matrix ys = langevin_sample_batch(model, xs, cfg, exec);
  const double unit = scale == ResidualScale::kSum ? 1.0 : 1.0 / static_cast<double>(dim);
  std::vector<double> viol(cfg.n_chains);
  std::size_t feasible = 0;
  for (std::size_t c = 0; c < cfg.n_chains; ++c) {
    double t = 0.0;
    for (std::size_t k = 0; k < dim; ++k) t += ys(c, k) * ys(c, k) - xs(c, k) * xs(c, k);
    viol[c] = std::abs(t * unit);
    if (viol[c] <= epsilon_tol) ++feasible;
  }
  ViolationStats s;
  s.epsilon_tol = epsilon_tol;
  s.mean_violation = pairwise_sum(viol) / static_cast<double>(viol.size());
  s.p95_violation = percentile(viol, 95.0);
  s.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(viol.size());
  return s;
}

namespace {

std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ShapeError("spearman needs equal lengths >= 2");
  const auto ra = midranks(a);
  const auto rb = midranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace bl
