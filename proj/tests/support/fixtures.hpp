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

// Shared fixtures and reference implementations for the test suites.
#ifndef BL_TESTS_SUPPORT_FIXTURES_HPP_
#define BL_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bl/gibbs.hpp"
#include "bl/network.hpp"
#include "bl/training.hpp"

namespace bl::testing {

struct RandomNetOptions {
  HeadStyle style = HeadStyle::kIBL;
  std::size_t depth = 1;
  SkipMode skip = SkipMode::kNone;
  OutputMode mode = OutputMode::kScalar;
  std::size_t x_dim = 2;
  std::size_t y_dim = 1;
  std::size_t n_classes = 0;
  int degree = 2;
  std::uint64_t seed = 1;
  double scale = 0.5;  // std of the random parameters
  std::vector<std::size_t> widths;  // overrides depth and the 3,2,2,... default
};

// Network with widths 3,2,... and every parameter drawn N(0, scale^2)
// (lambdas folded to |.|).
Network random_network(const RandomNetOptions& o);

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0);

// Random batch consistent with the network's response layout.
std::vector<Example> random_batch(const Network& net, std::size_t n, std::uint64_t seed);

// Swaps blocks a and b of `layer` and rewires every consumer (later layers,
// projections, identity shortcuts, readout) so the network function is unchanged.
void swap_blocks(Network& net, std::size_t layer, std::size_t a, std::size_t b);

// Negates every T-head row (coefficients and bias) of every block.
void flip_t_rows(Network& net);

// Central-difference gradient of f at p with step h.
template <class F>
std::vector<double> numeric_gradient(std::span<double> p, double h, F f) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = f();
    p[i] = saved - h;
    const double down = f();
    p[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Binary logistic regression by Newton iterations with a small ridge term.
class LogisticRegression {
 public:
  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
           double ridge = 1e-4, int iterations = 50);
  double probability(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return probability(x) >= 0.5 ? 1 : 0; }

 private:
  std::vector<double> w_;  // last entry is the intercept
};

// Two interleaved arcs, label in {0, 1}.
void make_moons(std::size_t n, double noise, std::uint64_t seed,
                std::vector<std::vector<double>>& x, std::vector<int>& y);

// Two Gaussian blobs centred at +-(2, 2).
void make_blobs(std::size_t n, std::uint64_t seed, std::vector<std::vector<double>>& x,
                std::vector<int>& y);

}  // namespace bl::testing

#endif  // BL_TESTS_SUPPORT_FIXTURES_HPP_
