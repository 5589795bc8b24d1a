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

#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bl::testing {

Network random_network(const RandomNetOptions& o) {
  NetworkSpec spec;
  spec.x_dim = o.x_dim;
  spec.mode = o.mode;
  spec.style = o.style;
  spec.skip = o.skip;
  if (o.mode == OutputMode::kScalar) {
    spec.y_dim = o.y_dim;
    spec.n_classes = o.n_classes;
  } else {
    spec.y_dim = 0;
    spec.n_classes = o.n_classes;
  }
  const std::size_t depth = o.widths.empty() ? o.depth : o.widths.size();
  for (std::size_t l = 0; l < depth; ++l) {
    LayerArch a;
    a.width = o.widths.empty() ? (l == 0 ? 3 : 2) : o.widths[l];
    a.u = {1, o.degree, {}};
    a.c = {1, o.degree, {}};
    a.t = {1, o.degree, {}};
    spec.layers.push_back(a);
  }
  Network net(spec);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> n(0.0, o.scale);
  for (double& v : net.params()) v = n(rng);
  for (const auto& [b, e] : net.lambda_ranges()) {
    for (std::size_t i = b; i < e; ++i) net.params()[i] = std::abs(net.params()[i]) + 0.1;
  }
  return net;
}

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t n, double sd) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

std::vector<Example> random_batch(const Network& net, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& spec = net.spec();
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    ex.x = gaussian_vector(rng, spec.x_dim, 0.7);
    if (spec.mode == OutputMode::kScalar) ex.y = gaussian_vector(rng, spec.y_dim, 0.7);
    if (spec.n_classes > 0) ex.label = static_cast<int>(rng() % spec.n_classes);
    ex.id = i;
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

void swap_input_coordinates(Network& net, std::size_t layer, std::size_t ia, std::size_t ib) {
  const BlockShape& sh = net.block_shape(layer);
  for (std::size_t blk = 0; blk < net.width(layer); ++blk) {
    auto p = net.block_params(layer, blk);
    for (int h = 0; h < 3; ++h) {
      const Head head = static_cast<Head>(h);
      const auto& hs = sh.head(head);
      if (hs.rows == 0) continue;
      const auto& ex = hs.basis->exponents();
      const std::size_t n = ex.size();
      for (std::size_t r = 0; r < hs.rows; ++r) {
        const std::size_t off = sh.coeff_offset(head) + r * n;
        std::vector<double> row(p.begin() + off, p.begin() + off + n);
        for (std::size_t j = 0; j < n; ++j) {
          Exponent e = ex[j];
          std::swap(e[ia], e[ib]);
          p[off + *hs.basis->index_of(e)] = row[j];
        }
      }
    }
  }
}

}  // namespace

void swap_blocks(Network& net, std::size_t layer, std::size_t a, std::size_t b) {
  auto pa = net.block_params(layer, a);
  auto pb = net.block_params(layer, b);
  std::swap_ranges(pa.begin(), pa.end(), pb.begin());
  auto params = net.params();
  if (net.has_projection(layer)) {
    const std::size_t wp = net.width(layer - 1);
    const std::size_t po = net.projection_offset(layer);
    for (std::size_t c = 0; c < wp; ++c) std::swap(params[po + a * wp + c], params[po + b * wp + c]);
  }
  const std::size_t L = net.depth();
  if (layer + 1 == L) {
    const std::size_t w = net.width(layer);
    auto W = net.readout_weight();
    for (std::size_t o = 0; o < net.output_dim(); ++o) std::swap(W[o * w + a], W[o * w + b]);
    return;
  }
  if (net.skip() == SkipMode::kDense) {
    for (std::size_t l = layer + 1; l < L; ++l) {
      std::size_t off = net.input_dim();
      for (std::size_t j = 0; j < layer; ++j) off += net.width(j);
      swap_input_coordinates(net, l, off + a, off + b);
    }
    return;
  }
  swap_input_coordinates(net, layer + 1, a, b);
  if (net.skip() == SkipMode::kResidual) {
    if (net.has_projection(layer + 1)) {
      const std::size_t wp = net.width(layer);
      const std::size_t po = net.projection_offset(layer + 1);
      for (std::size_t r = 0; r < net.width(layer + 1); ++r) {
        std::swap(params[po + r * wp + a], params[po + r * wp + b]);
      }
    } else {
      swap_blocks(net, layer + 1, a, b);
    }
  }
}

void flip_t_rows(Network& net) {
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const BlockShape& sh = net.block_shape(l);
    const std::size_t n = sh.rows(Head::kT) > 0 ? sh.head(Head::kT).basis->size() : 0;
    for (std::size_t blk = 0; blk < net.width(l); ++blk) {
      auto p = net.block_params(l, blk);
      for (std::size_t r = 0; r < sh.rows(Head::kT); ++r) {
        for (std::size_t j = 0; j < n; ++j) p[sh.coeff_offset(Head::kT) + r * n + j] *= -1.0;
        if (sh.with_bias()) p[sh.bias_offset(Head::kT) + r] *= -1.0;
      }
    }
  }
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace

void LogisticRegression::fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                             double ridge, int iterations) {
  const std::size_t d = x.front().size() + 1;
  w_.assign(d, 0.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(d, 0.0);
    std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::vector<double> xi = x[i];
      xi.push_back(1.0);
      const double p = probability(x[i]);
      for (std::size_t a = 0; a < d; ++a) {
        g[a] += (p - y[i]) * xi[a];
        for (std::size_t b = 0; b < d; ++b) h[a][b] += p * (1 - p) * xi[a] * xi[b];
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      g[a] += ridge * w_[a];
      h[a][a] += ridge;
    }
    const auto step = solve(h, g);
    for (std::size_t a = 0; a < d; ++a) w_[a] -= step[a];
  }
}

double LogisticRegression::probability(std::span<const double> x) const {
  double s = w_.back();
  for (std::size_t k = 0; k < x.size(); ++k) s += w_[k] * x[k];
  return 1.0 / (1.0 + std::exp(-s));
}

void make_moons(std::size_t n, double noise, std::uint64_t seed,
                std::vector<std::vector<double>>& x, std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, std::numbers::pi);
  std::normal_distribution<double> e(0.0, noise);
  x.clear();
  y.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double t = u(rng);
    double a = std::cos(t);
    double b = std::sin(t);
    if (label == 1) {
      a = 1.0 - a;
      b = 0.5 - b;
    }
    x.push_back({a + e(rng), b + e(rng)});
    y.push_back(label);
  }
}

void make_blobs(std::size_t n, std::uint64_t seed, std::vector<std::vector<double>>& x,
                std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, 1.0);
  x.clear();
  y.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double c = label == 0 ? -2.0 : 2.0;
    x.push_back({c + e(rng), c + e(rng)});
    y.push_back(label);
  }
}

}  // namespace bl::testing
