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

#ifndef BL_POLY_HPP_
#define BL_POLY_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bl/dual.hpp"
#include "bl/matrix.hpp"

namespace bl {

using Exponent = std::vector<int>;

inline constexpr int kMaxDegree = 4;

// A fixed, ordered set of monomials over an input vector. Ordering is graded
// lexicographic: ascending total degree, then descending lexicographic order
// of the exponent vector (so x1 precedes x2).
class MonomialBasis {
 public:
  // Complete basis of total degree <= degree.
  static MonomialBasis complete(std::size_t input_dim, int degree, bool exclude_constant);

  // Arbitrary monomial set; sorted into graded-lex order, duplicates rejected.
  static MonomialBasis from_exponents(std::size_t input_dim, std::vector<Exponent> exponents);

  // Union of the complete basis and extra monomials (on-demand higher-order terms).
  // degree = 0 selects only the extra monomials.
  static MonomialBasis augmented(std::size_t input_dim, int degree, bool exclude_constant,
                                 const std::vector<Exponent>& extra);

  // Subset of monomials with a nonzero exponent somewhere in [begin, end).
  MonomialBasis restricted_to(std::size_t begin, std::size_t end) const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t size() const { return exponents_.size(); }
  int degree() const { return degree_; }
  bool exclude_constant() const { return exclude_constant_; }
  // True when the basis is exactly complete(input_dim, degree, exclude_constant).
  bool is_complete() const { return complete_; }
  const std::vector<Exponent>& exponents() const { return exponents_; }
  std::optional<std::size_t> index_of(const Exponent& e) const;

  // out[j] = prod_k z_k^{e_jk}
  template <class S>
  void eval(std::span<const S> z, std::span<S> out) const;

  // Accumulates dz += sum_j g[j] * d m_j / dz.
  template <class S>
  void accumulate_gradient(std::span<const S> z, std::span<const S> g, std::span<S> dz) const;

  bool operator==(const MonomialBasis& o) const {
    return input_dim_ == o.input_dim_ && exponents_ == o.exponents_;
  }

 private:
  struct Factor {
    std::uint32_t var;
    int power;
  };

  MonomialBasis(std::size_t input_dim, std::vector<Exponent> exponents, bool complete);

  std::size_t input_dim_ = 0;
  int degree_ = 0;
  bool exclude_constant_ = true;
  bool complete_ = false;
  std::vector<Exponent> exponents_;
  std::vector<std::vector<Factor>> factors_;
};

// Graded-lex comparison: true if a precedes b.
bool graded_lex_less(const Exponent& a, const Exponent& b);

// build_basis: input_dim >= 1, 1 <= degree <= kMaxDegree.
MonomialBasis build_basis(std::size_t input_dim, int degree, bool exclude_constant);

// coeff * m(z) + bias over a shared basis. `y_begin`/`y_end` mark the span of
// the input holding the response y.
class PolynomialMap {
 public:
  PolynomialMap(std::shared_ptr<const MonomialBasis> basis, std::size_t out_dim, bool with_bias,
                std::size_t y_begin, std::size_t y_end);

  const MonomialBasis& basis() const { return *basis_; }
  std::shared_ptr<const MonomialBasis> basis_ptr() const { return basis_; }
  std::size_t out_dim() const { return out_dim_; }
  bool has_bias() const { return has_bias_; }
  std::size_t y_begin() const { return y_begin_; }
  std::size_t y_end() const { return y_end_; }

  // Row-major out_dim x basis().size().
  std::span<double> coeff() { return coeff_; }
  std::span<const double> coeff() const { return coeff_; }
  double& coeff(std::size_t row, std::size_t col) { return coeff_[row * basis_->size() + col]; }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  // True if no monomial without a y factor carries a nonzero coefficient and
  // the bias is disabled.
  bool y_dependent_only() const;

  std::vector<double> eval_features(std::span<const double> z) const;
  // d eval_features / d z restricted to the y columns: out_dim x (y_end - y_begin).
  Matrix jacobian_y(std::span<const double> z) const;

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  std::size_t out_dim_;
  bool has_bias_;
  std::size_t y_begin_;
  std::size_t y_end_;
  std::vector<double> coeff_;
  std::vector<double> bias_;
};

// Non-owning view of one linear-over-monomials head: rows x basis.size()
// coefficients plus an optional bias (empty span when disabled).
struct MapView {
  const MonomialBasis* basis = nullptr;
  std::size_t rows = 0;
  std::span<const double> coeff;
  std::span<const double> bias;
};

// ---------------------------------------------------------------------------

template <class S>
void MonomialBasis::eval(std::span<const S> z, std::span<S> out) const {
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    S m = 1.0;
    for (const Factor& f : factors_[j]) m *= ipow(z[f.var], f.power);
    out[j] = m;
  }
}

template <class S>
void MonomialBasis::accumulate_gradient(std::span<const S> z, std::span<const S> g,
                                        std::span<S> dz) const {
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto& fs = factors_[j];
    if (fs.empty()) continue;
    if (is_exact_zero(g[j])) continue;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      S d = static_cast<double>(fs[i].power);
      d *= ipow(z[fs[i].var], fs[i].power - 1);
      for (std::size_t k = 0; k < fs.size(); ++k) {
        if (k != i) d *= ipow(z[fs[k].var], fs[k].power);
      }
      dz[fs[i].var] += g[j] * d;
    }
  }
}

// out[r] = sum_j coeff[r, j] m[j] + bias[r]
template <class S>
void apply_map(const MapView& map, std::span<const S> monomials, std::span<S> out) {
  const std::size_t n = map.basis->size();
  for (std::size_t r = 0; r < map.rows; ++r) {
    S acc = map.bias.empty() ? S(0.0) : S(map.bias[r]);
    const double* c = map.coeff.data() + r * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] != 0.0) acc += c[j] * monomials[j];
    }
    out[r] = acc;
  }
}

}  // namespace bl

#endif  // BL_POLY_HPP_
