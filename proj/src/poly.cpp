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

#include "bl/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "bl/error.hpp"

namespace bl {

namespace {

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

// Appends every exponent vector of total degree `remaining` over positions
// [pos, dim), first component largest first.
void compositions(std::size_t pos, int remaining, Exponent& current, std::vector<Exponent>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[pos] = k;
    compositions(pos + 1, remaining - k, current, out);
  }
  current[pos] = 0;
}

}  // namespace

bool graded_lex_less(const Exponent& a, const Exponent& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

MonomialBasis::MonomialBasis(std::size_t input_dim, std::vector<Exponent> exponents, bool complete)
    : input_dim_(input_dim), complete_(complete), exponents_(std::move(exponents)) {
  exclude_constant_ = true;
  factors_.reserve(exponents_.size());
  for (const Exponent& e : exponents_) {
    const int d = total_degree(e);
    degree_ = std::max(degree_, d);
    if (d == 0) exclude_constant_ = false;
    std::vector<Factor> fs;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] > 0) fs.push_back({static_cast<std::uint32_t>(k), e[k]});
    }
    factors_.push_back(std::move(fs));
  }
}

MonomialBasis MonomialBasis::complete(std::size_t input_dim, int degree, bool exclude_constant) {
  if (input_dim == 0) throw ShapeError("monomial basis needs input_dim >= 1");
  if (degree < 1) throw ShapeError("monomial basis needs degree >= 1 (empty basis)");
  if (degree > kMaxDegree) {
    throw ShapeError("monomial degree " + std::to_string(degree) + " exceeds the cap of " +
                     std::to_string(kMaxDegree));
  }
  std::vector<Exponent> exps;
  Exponent current(input_dim, 0);
  for (int d = exclude_constant ? 1 : 0; d <= degree; ++d) compositions(0, d, current, exps);
  MonomialBasis b(input_dim, std::move(exps), true);
  b.degree_ = degree;
  b.exclude_constant_ = exclude_constant;
  return b;
}

MonomialBasis MonomialBasis::from_exponents(std::size_t input_dim, std::vector<Exponent> exponents) {
  if (input_dim == 0) throw ShapeError("monomial basis needs input_dim >= 1");
  if (exponents.empty()) throw ShapeError("empty monomial basis");
  for (const Exponent& e : exponents) {
    if (e.size() != input_dim) {
      throw ShapeError("exponent vector of length " + std::to_string(e.size()) +
                       " for input_dim " + std::to_string(input_dim));
    }
    if (std::any_of(e.begin(), e.end(), [](int p) { return p < 0; })) {
      throw ShapeError("negative exponent");
    }
    if (total_degree(e) > kMaxDegree) throw ShapeError("monomial exceeds the degree cap");
  }
  std::sort(exponents.begin(), exponents.end(), graded_lex_less);
  if (std::adjacent_find(exponents.begin(), exponents.end()) != exponents.end()) {
    throw ShapeError("duplicate monomial in basis");
  }
  return MonomialBasis(input_dim, std::move(exponents), false);
}

MonomialBasis MonomialBasis::augmented(std::size_t input_dim, int degree, bool exclude_constant,
                                       const std::vector<Exponent>& extra) {
  if (extra.empty()) return complete(input_dim, degree, exclude_constant);
  std::vector<Exponent> exps;
  if (degree > 0) exps = complete(input_dim, degree, exclude_constant).exponents();
  for (const Exponent& e : extra) {
    if (std::find(exps.begin(), exps.end(), e) == exps.end()) exps.push_back(e);
  }
  return from_exponents(input_dim, std::move(exps));
}

MonomialBasis MonomialBasis::restricted_to(std::size_t begin, std::size_t end) const {
  std::vector<Exponent> kept;
  for (const Exponent& e : exponents_) {
    for (std::size_t k = begin; k < end && k < e.size(); ++k) {
      if (e[k] > 0) {
        kept.push_back(e);
        break;
      }
    }
  }
  if (kept.empty()) throw ShapeError("no monomial depends on the requested input range");
  return MonomialBasis(input_dim_, std::move(kept), false);
}

std::optional<std::size_t> MonomialBasis::index_of(const Exponent& e) const {
  auto it = std::lower_bound(exponents_.begin(), exponents_.end(), e, graded_lex_less);
  if (it == exponents_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - exponents_.begin());
}

MonomialBasis build_basis(std::size_t input_dim, int degree, bool exclude_constant) {
  return MonomialBasis::complete(input_dim, degree, exclude_constant);
}

PolynomialMap::PolynomialMap(std::shared_ptr<const MonomialBasis> basis, std::size_t out_dim,
                             bool with_bias, std::size_t y_begin, std::size_t y_end)
    : basis_(std::move(basis)),
      out_dim_(out_dim),
      has_bias_(with_bias),
      y_begin_(y_begin),
      y_end_(y_end),
      coeff_(out_dim * basis_->size(), 0.0),
      bias_(with_bias ? out_dim : 0, 0.0) {
  if (y_begin_ > y_end_ || y_end_ > basis_->input_dim()) {
    throw ShapeError("response index range outside the map input");
  }
}

bool PolynomialMap::y_dependent_only() const {
  if (has_bias_) return false;
  const auto& exps = basis_->exponents();
  for (std::size_t j = 0; j < exps.size(); ++j) {
    bool touches_y = false;
    for (std::size_t k = y_begin_; k < y_end_; ++k) touches_y |= exps[j][k] > 0;
    if (touches_y) continue;
    for (std::size_t r = 0; r < out_dim_; ++r) {
      if (coeff_[r * exps.size() + j] != 0.0) return false;
    }
  }
  return true;
}

std::vector<double> PolynomialMap::eval_features(std::span<const double> z) const {
  if (z.size() != basis_->input_dim()) {
    throw ShapeError("polynomial map expects input of length " +
                     std::to_string(basis_->input_dim()) + ", got " + std::to_string(z.size()));
  }
  std::vector<double> m(basis_->size());
  basis_->eval<double>(z, m);
  std::vector<double> out(out_dim_);
  apply_map<double>(MapView{basis_.get(), out_dim_, coeff_, bias_}, m, out);
  return out;
}

Matrix PolynomialMap::jacobian_y(std::span<const double> z) const {
  if (z.size() != basis_->input_dim()) {
    throw ShapeError("polynomial map expects input of length " +
                     std::to_string(basis_->input_dim()) + ", got " + std::to_string(z.size()));
  }
  const std::size_t n = basis_->size();
  Matrix jac(out_dim_, y_end_ - y_begin_);
  std::vector<double> dz(z.size());
  for (std::size_t r = 0; r < out_dim_; ++r) {
    std::fill(dz.begin(), dz.end(), 0.0);
    basis_->accumulate_gradient<double>(z, std::span<const double>(coeff_).subspan(r * n, n), dz);
    for (std::size_t k = y_begin_; k < y_end_; ++k) jac(r, k - y_begin_) = dz[k];
  }
  return jac;
}

}  // namespace bl
