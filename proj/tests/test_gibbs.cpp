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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bl/error.hpp"
#include "bl/gibbs.hpp"
#include "support/fixtures.hpp"

namespace bl {
namespace {

using testing::gaussian_vector;

// Scalar IBL model with energy -weight * y^2 over one x and one y.
GibbsModel quadratic_model(double weight, double tau) {
  NetworkSpec s;
  s.x_dim = 1;
  s.y_dim = 1;
  s.style = HeadStyle::kIBL;
  LayerArch la;
  la.width = 1;
  la.u.rank = 0;
  la.c.rank = 0;
  la.t = {1, 1, {}};
  s.layers = {la};
  Network net(s);
  const auto& shape = net.block_shape(0);
  auto p = net.block_params(0, 0);
  p[shape.lambda_offset(Head::kT)] = weight;
  p[shape.coeff_offset(Head::kT)] = 1.0;
  net.readout_weight()[0] = 1.0;
  return GibbsModel(std::move(net), tau);
}

GibbsModel class_model(std::size_t classes, std::uint64_t seed) {
  testing::RandomNetOptions o;
  o.mode = OutputMode::kClassVector;
  o.y_dim = 0;
  o.n_classes = classes;
  o.seed = seed;
  return GibbsModel(testing::random_network(o), 1.0);
}

double ks_normal(std::vector<double> v, double sd) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = 0.5 * std::erfc(-v[i] / (sd * std::sqrt(2.0)));
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

TEST(Softmax, SymmetricUtilities) {
  for (double c : {-50.0, 0.0, 3.5, 1e3}) {
    for (double tau : {0.01, 1.0, 10.0}) {
      const auto p = softmax_tempered(std::vector<double>{c, c}, tau);
      EXPECT_EQ(p[0], 0.5);
      EXPECT_EQ(p[1], 0.5);
    }
  }
}

TEST(Softmax, ClosedForm) {
  const auto p = softmax_tempered(std::vector<double>{1.0, 0.0}, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(p[0], e / (1 + e), 1e-15);
  EXPECT_NEAR(p[1], 1 / (1 + e), 1e-15);
  EXPECT_NEAR(p[0], 0.73106, 5e-6);
}

TEST(Softmax, LowTemperatureConcentrates) {
  const auto p = softmax_tempered(std::vector<double>{1.0, 0.0}, 0.01);
  EXPECT_GE(p[0], 1.0 - 1e-40);
  EXPECT_LE(p[1], 1e-40);
}

TEST(Softmax, NonFiniteUtilityIsAnError) {
  EXPECT_THROW(softmax_tempered(std::vector<double>{1.0, NAN}, 1.0), NumericError);
  EXPECT_THROW(softmax_tempered(std::vector<double>{}, 1.0), ShapeError);
}

TEST(Softmax, NormalizationAndShiftInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t m = 2 + i % 7;
    auto u = gaussian_vector(rng, m, std::pow(10.0, scale(rng)));
    const double tau = std::pow(10.0, scale(rng));
    const auto p0 = softmax_tempered(u, tau);
    double sum = 0.0;
    for (double v : p0) sum += v;
    EXPECT_LE(std::abs(sum - 1.0), 1e-12);
    // dyadic utilities and an integer shift keep u + shift exact
    const double shift = std::round(std::uniform_real_distribution<double>(-100, 100)(rng));
    for (double& v : u) v = std::ldexp(std::round(std::ldexp(v, 30)), -30);
    const auto p = softmax_tempered(u, tau);
    for (double& v : u) {
      ASSERT_EQ((v + shift) - shift, v);
      v += shift;
    }
    const auto q = softmax_tempered(u, tau);
    for (std::size_t k = 0; k < m; ++k) EXPECT_LE(std::abs(p[k] - q[k]), 1e-15);
  }
}

TEST(Softmax, ArgmaxMassGrowsAsTemperatureFalls) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto u = gaussian_vector(rng, 4);
    const std::size_t best = std::max_element(u.begin(), u.end()) - u.begin();
    double prev = 0.0;
    for (double tau = 1.0; tau >= 1e-3; tau /= 1.5) {
      const double p = softmax_tempered(u, tau)[best];
      EXPECT_GE(p, prev);
      prev = p;
    }
  }
}

TEST(ClassProbs, MatchesUtilities) {
  const GibbsModel model = class_model(3, 7);
  const GibbsModel hot(model.net, 0.25);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto x = gaussian_vector(rng, 2);
    const auto u = forward(model.net, x, {});
    EXPECT_EQ(class_probs(hot, x), softmax_tempered(u, 0.25));
  }
}

TEST(ClassProbs, Errors) {
  EXPECT_THROW(GibbsModel(quadratic_model(1, 1).net, 0.0), ConfigError);
  const GibbsModel q = quadratic_model(1, 1);
  EXPECT_THROW(class_probs(q, std::vector<double>{0.0}), ModeError);
}

TEST(Quadrature, GaussianIntegral) {
  const GibbsModel model = quadratic_model(0.5, 1.0);
  const double lz = log_partition_quadrature(model, std::vector<double>{0.3}, std::vector<double>{-8.0},
                                             std::vector<double>{8.0}, 2048);
  EXPECT_NEAR(lz, 0.5 * std::log(2 * M_PI), 1e-6);
}

TEST(Quadrature, UniformIsZero) {
  const GibbsModel model = quadratic_model(0.0, 1.0);
  const double lz = log_partition_quadrature(model, std::vector<double>{0.3}, std::vector<double>{0.0},
                                             std::vector<double>{1.0}, 64);
  EXPECT_NEAR(lz, 0.0, 1e-15);
}

TEST(Quadrature, RefinementIsStable) {
  const GibbsModel model = quadratic_model(0.7, 0.8);
  const std::vector<double> x{0.1}, lo{-10.0}, hi{10.0};
  const double a = log_partition_quadrature(model, x, lo, hi, 1024);
  const double b = log_partition_quadrature(model, x, lo, hi, 2048);
  EXPECT_LE(std::abs(a - b), 1e-8);
}

TEST(Quadrature, TwoDimensionalGaussian) {
  testing::RandomNetOptions o;
  NetworkSpec s;
  s.x_dim = 1;
  s.y_dim = 2;
  s.style = HeadStyle::kIBL;
  LayerArch la;
  la.width = 1;
  la.u.rank = 0;
  la.c.rank = 0;
  la.t = {2, 1, {}};
  s.layers = {la};
  Network net(s);
  const auto& shape = net.block_shape(0);
  auto p = net.block_params(0, 0);
  p[shape.lambda_offset(Head::kT)] = 0.5;
  p[shape.lambda_offset(Head::kT) + 1] = 0.5;
  const auto& basis = *shape.head(Head::kT).basis;
  ASSERT_EQ(basis.size(), 2u);
  p[shape.coeff_offset(Head::kT)] = 1.0;
  p[shape.coeff_offset(Head::kT) + 3] = 1.0;
  net.readout_weight()[0] = 1.0;
  const GibbsModel model(std::move(net), 1.0);
  const double lz = log_partition_quadrature(model, std::vector<double>{0.0}, std::vector<double>{-8, -8},
                                             std::vector<double>{8, 8}, 512);
  EXPECT_NEAR(lz, std::log(2 * M_PI), 1e-6);
}

TEST(Quadrature, Errors) {
  testing::RandomNetOptions o;
  o.y_dim = 3;
  const GibbsModel model(testing::random_network(o), 1.0);
  const std::vector<double> x{0.0, 0.0}, lo(3, -1.0), hi(3, 1.0);
  EXPECT_THROW(log_partition_quadrature(model, x, lo, hi, 32), UnsupportedError);
  const GibbsModel q = quadratic_model(0.5, 1.0);
  EXPECT_THROW(log_partition_quadrature(q, std::vector<double>{0.0}, std::vector<double>{-1.0},
                                        std::vector<double>{1.0}, 8),
               ConfigError);
  EXPECT_THROW(log_partition_quadrature(q, std::vector<double>{0.0}, std::vector<double>{1.0},
                                        std::vector<double>{-1.0}, 32),
               ConfigError);
}

TEST(Quadrature, DensityIntegratesToOne) {
  const GibbsModel model = quadratic_model(0.3, 0.9);
  const auto g = gibbs_density_1d(model, std::vector<double>{0.5}, -12.0, 12.0, 801);
  double mass = 0.0;
  const double h = g.nodes[1] - g.nodes[0];
  for (std::size_t i = 0; i < g.density.size(); ++i) {
    mass += (i == 0 || i + 1 == g.density.size() ? 0.5 : 1.0) * g.density[i] * h;
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  const QuadratureGrid grid{{-12.0}, {12.0}, 801};
  const double ld = quadrature_log_density(model, std::vector<double>{0.5}, std::vector<double>{1.0}, grid);
  // N(0, tau / (2 weight)) density at 1
  const double var = 0.9 / (2 * 0.3);
  EXPECT_NEAR(ld, -0.5 * std::log(2 * M_PI * var) - 0.5 / var, 1e-8);
}

TEST(Langevin, StationaryGaussianMoments) {
  const GibbsModel model = quadratic_model(0.5, 1.0);
  LangevinConfig cfg;
  cfg.step_size = 1e-3;
  cfg.n_steps = 20000;
  cfg.burn_in = 1000;
  cfg.n_chains = 256;
  cfg.seed = 17;
  const Matrix ys = langevin_sample(model, std::vector<double>{0.0}, cfg);
  double mean = 0.0, sq = 0.0;
  for (double v : ys.data) mean += v;
  mean /= ys.rows;
  for (double v : ys.data) sq += (v - mean) * (v - mean);
  const double var = sq / (ys.rows - 1);
  EXPECT_LE(std::abs(mean), 0.1);
  EXPECT_LE(std::abs(var - 1.0), 0.15);
}

TEST(Langevin, MatchesQuadratureCdf) {
  const GibbsModel model = quadratic_model(1.0, 1.0);
  LangevinConfig cfg;
  cfg.step_size = 1e-2;
  cfg.n_steps = 1000;
  cfg.burn_in = 500;
  cfg.n_chains = 10000;
  cfg.seed = 4;
  const Matrix ys = langevin_sample(model, std::vector<double>{0.0}, cfg);
  // stationary law N(0, tau / (2 weight)) = N(0, 0.5)
  EXPECT_LE(ks_normal(ys.data, std::sqrt(0.5)), 0.05);
}

TEST(Langevin, UpdateRuleTargetsSquaredTemperature) {
  // y += eta grad/tau + sqrt(2 eta tau) xi is stationary at exp(BL / tau^2):
  // N(0, tau^2 / (2 weight)) for BL = -weight y^2.
  const GibbsModel model = quadratic_model(1.0, 0.5);
  LangevinConfig cfg;
  cfg.step_size = 1e-2;
  cfg.n_steps = 2000;
  cfg.burn_in = 500;
  cfg.n_chains = 10000;
  cfg.seed = 5;
  const Matrix ys = langevin_sample(model, std::vector<double>{0.0}, cfg);
  EXPECT_LE(ks_normal(ys.data, std::sqrt(0.125)), 0.03);
  EXPECT_GE(ks_normal(ys.data, std::sqrt(0.25)), 0.06);  // population distance 0.083
}

TEST(Langevin, ZeroStepStaysAtInitialization) {
  const GibbsModel model = quadratic_model(0.5, 1.0);
  LangevinConfig cfg;
  cfg.step_size = 0.0;
  cfg.zero_noise = true;
  cfg.n_chains = 8;
  cfg.burn_in = 0;
  cfg.n_steps = 1;
  const Matrix a = langevin_sample(model, std::vector<double>{0.2}, cfg);
  cfg.n_steps = 50;
  const Matrix b = langevin_sample(model, std::vector<double>{0.2}, cfg);
  EXPECT_EQ(a.data, b.data);
}

TEST(Langevin, SingleDeterministicStep) {
  testing::RandomNetOptions o;
  o.x_dim = 2;
  o.y_dim = 2;
  o.seed = 12;
  const GibbsModel model(testing::random_network(o), 0.7);
  LangevinConfig cfg;
  cfg.step_size = 0.0;
  cfg.zero_noise = true;
  cfg.n_chains = 1;
  cfg.n_steps = 1;
  cfg.burn_in = 0;
  const std::vector<double> x{0.4, -0.3};
  const Matrix y0 = langevin_sample(model, x, cfg);
  cfg.step_size = 0.05;
  const Matrix y1 = langevin_sample(model, x, cfg);
  const auto g = score_y(model.net, x, y0.row(0));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(y1(0, k), y0(0, k) + 0.05 * (g[k] / 0.7));
}

TEST(Langevin, DeterministicAndExecIndependent) {
  testing::RandomNetOptions o;
  o.y_dim = 2;
  o.depth = 2;
  o.seed = 3;
  o.scale = 0.2;
  const GibbsModel model(testing::random_network(o), 0.5);
  LangevinConfig cfg;
  cfg.step_size = 1e-4;
  cfg.n_steps = 200;
  cfg.burn_in = 10;
  cfg.n_chains = 33;
  cfg.seed = 99;
  const std::vector<double> x{0.1, 0.2};
  const Matrix a = langevin_sample(model, x, cfg, Exec::kParallel);
  const Matrix b = langevin_sample(model, x, cfg, Exec::kParallel);
  const Matrix c = langevin_sample(model, x, cfg, Exec::kSerial);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.data, c.data);
  cfg.seed = 100;
  EXPECT_NE(langevin_sample(model, x, cfg).data, a.data);
}

TEST(Langevin, DivergenceNamesStep) {
  const GibbsModel model = quadratic_model(-5.0, 1.0);  // repulsive, exp growth
  LangevinConfig cfg;
  cfg.step_size = 0.5;
  cfg.n_steps = 200;
  cfg.burn_in = 0;
  cfg.n_chains = 4;
  try {
    langevin_sample(model, std::vector<double>{0.0}, cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 0u);
    EXPECT_NE(std::string(e.what()).find("step " + std::to_string(e.step())), std::string::npos);
  }
}

TEST(Langevin, ConfigAndModeErrors) {
  LangevinConfig cfg;
  cfg.burn_in = cfg.n_steps;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.n_chains = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  const GibbsModel cls = class_model(3, 1);
  EXPECT_THROW(langevin_sample(cls, std::vector<double>{0.0, 0.0}, LangevinConfig{}), ModeError);
}

TEST(Diagnostic, PenaltyEnergyForm) {
  const Network net = penalty_network(3, 25.0);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const auto x = gaussian_vector(rng, 3), y = gaussian_vector(rng, 3);
    double t = 0.0;
    for (std::size_t k = 0; k < 3; ++k) t += y[k] * y[k] - x[k] * x[k];
    EXPECT_NEAR(forward(net, x, y)[0], -25.0 * t * t, 1e-12 * (1 + 25 * t * t));
  }
  const Network mean = penalty_network(4, 2.0, ResidualScale::kMean);
  const std::vector<double> x(4, 1.0), y(4, 2.0);
  EXPECT_NEAR(forward(mean, x, y)[0], -2.0 * 9.0, 1e-12);
}

TEST(Diagnostic, PureDiffusionFeasibleFraction) {
  LangevinConfig cfg;  // library defaults
  cfg.seed = 8;
  const std::size_t dim = 64;
  const ViolationStats s = constraint_diagnostic(dim, 0.0, 0.05, cfg, 0.1);
  // Oracle: y_final ~ N(0, (1 + 2 eta tau n) I), x ~ N(0, I), independent.
  const double var = 1.0 + 2.0 * cfg.step_size * 0.05 * static_cast<double>(cfg.n_steps);
  std::mt19937_64 rng(123);
  std::normal_distribution<double> n(0.0, 1.0);
  const int draws = 200000;
  int hits = 0;
  for (int d = 0; d < draws; ++d) {
    double t = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double y = std::sqrt(var) * n(rng), x = n(rng);
      t += y * y - x * x;
    }
    hits += std::abs(t) <= 0.1;
  }
  const double p = static_cast<double>(hits) / draws;
  const double chains = static_cast<double>(cfg.n_chains);
  const double bound = 4.0 * std::sqrt(p * (1 - p) / chains) + 1.0 / chains;
  EXPECT_LE(std::abs(s.feasible_fraction - p), bound) << "oracle " << p;
  EXPECT_GE(s.p95_violation, s.mean_violation * 0.0);
  EXPECT_GE(s.feasible_fraction, 0.0);
  EXPECT_LE(s.feasible_fraction, 1.0);
}

TEST(Diagnostic, ExecIndependent) {
  LangevinConfig cfg;
  cfg.n_chains = 16;
  cfg.n_steps = 100;
  cfg.burn_in = 10;
  const auto a = constraint_diagnostic(8, 3.0, 0.5, cfg, 0.1, ResidualScale::kSum, Exec::kSerial);
  const auto b = constraint_diagnostic(8, 3.0, 0.5, cfg, 0.1, ResidualScale::kSum, Exec::kParallel);
  EXPECT_EQ(a.mean_violation, b.mean_violation);
  EXPECT_EQ(a.p95_violation, b.p95_violation);
  EXPECT_EQ(a.feasible_fraction, b.feasible_fraction);
}

TEST(Stats, Percentile) {
  EXPECT_EQ(percentile({3, 1, 2, 4, 5}, 50), 3.0);
  EXPECT_EQ(percentile({1, 2}, 95), 1.95);
  EXPECT_EQ(percentile({7}, 95), 7.0);
  EXPECT_THROW(percentile({}, 50), ShapeError);
}

TEST(Stats, Spearman) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(a, std::vector<double>{10, 20, 30, 40, 50}), 1.0, 1e-15);
  EXPECT_NEAR(spearman(a, std::vector<double>{5, 4, 3, 2, 1}), -1.0, 1e-15);
  // ties use midranks: ranks (1.5, 1.5, 3) against (1, 2, 3)
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{0, 0, 1}), std::sqrt(3.0) / 2, 1e-12);
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), ShapeError);
}

}  // namespace
}  // namespace bl
