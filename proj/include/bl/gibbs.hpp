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

#ifndef BL_GIBBS_HPP_
#define BL_GIBBS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bl/matrix.hpp"
#include "bl/network.hpp"
#include "bl/parallel.hpp"

namespace bl {

// p_tau(y | x) proportional to exp(BL(x, y) / tau).
struct GibbsModel {
  Network net;
  double tau = 1.0;

  GibbsModel(Network n, double t);
};

// Class utilities: the readout rows in class-vector mode, or BL(x, [e_k; y])
// for every candidate k in scalar mode with a discrete response.
std::vector<double> class_utilities(const Network& net, std::span<const double> x,
                                    std::span<const double> y_cont = {});

// softmax(u / tau) via max-subtracted log-sum-exp.
std::vector<double> softmax_tempered(std::span<const double> utilities, double tau);

std::vector<double> class_probs(const GibbsModel& model, std::span<const double> x,
                                std::span<const double> y_cont = {});

// Tensor-product trapezoid grid over [lo, hi] for a continuous response of
// dimension 1 or 2. points_per_dim >= 16.
struct QuadratureGrid {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t points_per_dim = 0;
};

double log_partition_quadrature(const GibbsModel& model, std::span<const double> x,
                                std::span<const double> lo, std::span<const double> hi,
                                std::size_t points_per_dim, Exec exec = Exec::kParallel);

// log p_tau(y | x) with the partition function from quadrature.
double quadrature_log_density(const GibbsModel& model, std::span<const double> x,
                              std::span<const double> y, const QuadratureGrid& grid);

// Normalized 1-D Gibbs density on the trapezoid grid nodes, plus the nodes.
struct GridDensity {
  std::vector<double> nodes;
  std::vector<double> density;
};
GridDensity gibbs_density_1d(const GibbsModel& model, std::span<const double> x, double lo,
                             double hi, std::size_t points);

struct LangevinConfig {
  double step_size = 1e-4;
  std::size_t n_steps = 1500;
  std::size_t burn_in = 500;
  std::size_t n_chains = 512;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  bool zero_noise = false;  // drops the sqrt(2 eta tau) xi term

  void validate() const;
};

// Chains whose norm exceeds this are reported as divergent.
inline constexpr double kDivergenceNorm = 1e6;

// n_chains x y_dim final states, all chains conditioned on the same x.
Matrix langevin_sample(const GibbsModel& model, std::span<const double> x,
                       const LangevinConfig& cfg, Exec exec = Exec::kParallel);

// One conditioning row of xs per chain (xs.rows == cfg.n_chains).
Matrix langevin_sample_batch(const GibbsModel& model, const Matrix& xs,
                             const LangevinConfig& cfg, Exec exec = Exec::kParallel);

struct ViolationStats {
  double mean_violation = 0.0;
  double p95_violation = 0.0;
  double feasible_fraction = 0.0;
  double epsilon_tol = 0.1;
};

// Scaling of the conservation residual. kSum: T = |y|^2 - |x|^2.
// kMean: T = (|y|^2 - |x|^2) / dim, used both in the energy and in the
// reported violation.
enum class ResidualScale { kSum, kMean };
std::string to_string(ResidualScale s);
ResidualScale residual_scale_from_string(const std::string& s);

// Pure-penalty network BL(x, y) = -lambda T(x, y)^2 with x, y in R^dim.
Network penalty_network(std::size_t dim, double lambda, ResidualScale scale = ResidualScale::kSum);

ViolationStats constraint_diagnostic(std::size_t dim, double lambda, double tau,
                                     const LangevinConfig& cfg, double epsilon_tol,
                                     ResidualScale scale = ResidualScale::kSum,
                                     Exec exec = Exec::kParallel);

// Linear-interpolated percentile (q in [0, 100]).
double percentile(std::vector<double> v, double q);

// Spearman rank correlation with midranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace bl

#endif  // BL_GIBBS_HPP_
