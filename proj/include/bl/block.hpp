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

#ifndef BL_BLOCK_HPP_
#define BL_BLOCK_HPP_

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bl/dual.hpp"
#include "bl/poly.hpp"

namespace bl {

// BL: (tanh, relu, abs). IBL: (tanh, softplus, square).
enum class HeadStyle { kBL, kIBL };

std::string to_string(HeadStyle s);
HeadStyle head_style_from_string(const std::string& s);

enum class Head { kU = 0, kC = 1, kT = 2 };

struct HeadShape {
  std::shared_ptr<const MonomialBasis> basis;  // null when rows == 0
  std::size_t rows = 0;
};

// Structure of one penalty-form block. Parameters live in a flat span laid
// out as [lambda0 | lambda1 | lambda2 | U coeff | U bias | C coeff | C bias |
// T coeff | T bias]; coefficient blocks are row-major rows x basis size and
// bias blocks are absent when `with_bias` is false.
class BlockShape {
 public:
  BlockShape(std::size_t input_dim, HeadShape u, HeadShape c, HeadShape t, bool with_bias,
             HeadStyle style, bool identity_utility = false);

  std::size_t input_dim() const { return input_dim_; }
  HeadStyle style() const { return style_; }
  bool with_bias() const { return with_bias_; }
  bool identity_utility() const { return identity_utility_; }
  const HeadShape& head(Head h) const { return heads_[static_cast<int>(h)]; }
  std::size_t rows(Head h) const { return head(h).rows; }

  std::size_t param_count() const { return param_count_; }
  std::size_t lambda_offset(Head h) const { return lambda_off_[static_cast<int>(h)]; }
  std::size_t coeff_offset(Head h) const { return coeff_off_[static_cast<int>(h)]; }
  std::size_t bias_offset(Head h) const { return bias_off_[static_cast<int>(h)]; }
  std::size_t lambda_count() const { return rows(Head::kU) + rows(Head::kC) + rows(Head::kT); }

  MapView map_view(Head h, std::span<const double> params) const;

  bool operator==(const BlockShape& o) const;

 private:
  std::size_t input_dim_;
  HeadShape heads_[3];
  bool with_bias_;
  HeadStyle style_;
  bool identity_utility_;
  std::size_t lambda_off_[3]{};
  std::size_t coeff_off_[3]{};
  std::size_t bias_off_[3]{};
  std::size_t param_count_ = 0;
};

// Owning block: shape plus its parameter vector.
struct BlockParams {
  BlockShape shape;
  std::vector<double> values;

  explicit BlockParams(BlockShape s) : shape(std::move(s)), values(shape.param_count(), 0.0) {}

  std::span<double> lambda(Head h) {
    return {values.data() + shape.lambda_offset(h), shape.rows(h)};
  }
  std::span<double> coeff(Head h) {
    const auto& hs = shape.head(h);
    return {values.data() + shape.coeff_offset(h), hs.rows * (hs.basis ? hs.basis->size() : 0)};
  }
  std::span<double> bias(Head h) {
    return {values.data() + shape.bias_offset(h), shape.with_bias() ? shape.rows(h) : 0};
  }
};

// Convenience constructor: every head over the complete basis of its degree.
// rank 0 drops the head.
BlockShape make_block_shape(std::size_t input_dim, std::size_t r_u, int deg_u, std::size_t r_c,
                            int deg_c, std::size_t r_t, int deg_t, HeadStyle style,
                            bool with_bias);

double eval_block(const BlockShape& shape, std::span<const double> params,
                  std::span<const double> z);
inline double eval_block(const BlockParams& b, std::span<const double> z) {
  return eval_block(b.shape, b.values, z);
}

std::vector<double> block_grad_input(const BlockShape& shape, std::span<const double> params,
                                     std::span<const double> z);
inline std::vector<double> block_grad_input(const BlockParams& b, std::span<const double> z) {
  return block_grad_input(b.shape, b.values, z);
}

// Gradient of upstream * eval_block w.r.t. the flat parameter span.
std::vector<double> block_grad_params(const BlockShape& shape, std::span<const double> params,
                                      std::span<const double> z, double upstream);
inline std::vector<double> block_grad_params(const BlockParams& b, std::span<const double> z,
                                             double upstream) {
  return block_grad_params(b.shape, b.values, z, upstream);
}

// Smallest |pre-activation| over the relu/abs heads (infinity when the block
// has no kinked heads, i.e. IBL style or no C/T rows).
double kink_distance(const BlockShape& shape, std::span<const double> params,
                     std::span<const double> z);

// ---------------------------------------------------------------------------
// Generic kernels over double and Dual.

template <class S>
struct BlockCache {
  std::vector<S> mono[3];
  std::vector<S> pre[3];
};

namespace detail {

template <class S>
S utility_act(const S& u, bool identity) {
  using std::tanh;
  return identity ? u : tanh(u);
}
template <class S>
S utility_slope(const S& u, bool identity) {
  using std::tanh;
  if (identity) return S(1.0);
  const S t = tanh(u);
  return S(1.0) - t * t;
}
template <class S>
S ineq_act(const S& u, HeadStyle st) {
  return st == HeadStyle::kBL ? relu(u) : softplus(u);
}
template <class S>
S ineq_slope(const S& u, HeadStyle st) {
  return st == HeadStyle::kBL ? S(step(value_of(u))) : sigmoid(u);
}
template <class S>
S eq_act(const S& u, HeadStyle st) {
  return st == HeadStyle::kBL ? abs_value(u) : u * u;
}
template <class S>
S eq_slope(const S& u, HeadStyle st) {
  return st == HeadStyle::kBL ? S(sign0(value_of(u))) : S(2.0) * u;
}

}  // namespace detail

template <class S>
S block_forward(const BlockShape& shape, std::span<const double> p, std::span<const S> z,
                BlockCache<S>& cache) {
  S value = 0.0;
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    const HeadShape& hs = shape.head(head);
    auto& mono = cache.mono[h];
    auto& pre = cache.pre[h];
    if (hs.rows == 0) {
      mono.clear();
      pre.clear();
      continue;
    }
    mono.resize(hs.basis->size());
    pre.resize(hs.rows);
    hs.basis->eval<S>(z, mono);
    apply_map<S>(shape.map_view(head, p), mono, pre);
    const double* lam = p.data() + shape.lambda_offset(head);
    for (std::size_t r = 0; r < hs.rows; ++r) {
      if (head == Head::kU) {
        value += lam[r] * detail::utility_act(pre[r], shape.identity_utility());
      } else if (head == Head::kC) {
        value -= lam[r] * detail::ineq_act(pre[r], shape.style());
      } else {
        value -= lam[r] * detail::eq_act(pre[r], shape.style());
      }
    }
  }
  return value;
}

// Accumulates upstream * d block / d z into dz and, when dp is non-empty,
// upstream * d block / d params into dp.
template <class S>
void block_backward(const BlockShape& shape, std::span<const double> p, std::span<const S> z,
                    const BlockCache<S>& cache, const S& upstream, std::span<S> dz,
                    std::span<S> dp) {
  std::vector<S> dpre;
  std::vector<S> g;
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    const HeadShape& hs = shape.head(head);
    if (hs.rows == 0) continue;
    const auto& pre = cache.pre[h];
    const auto& mono = cache.mono[h];
    const double* lam = p.data() + shape.lambda_offset(head);
    dpre.assign(hs.rows, S(0.0));
    for (std::size_t r = 0; r < hs.rows; ++r) {
      S act;
      S slope;
      double sgn = 1.0;
      if (head == Head::kU) {
        act = detail::utility_act(pre[r], shape.identity_utility());
        slope = detail::utility_slope(pre[r], shape.identity_utility());
      } else if (head == Head::kC) {
        act = detail::ineq_act(pre[r], shape.style());
        slope = detail::ineq_slope(pre[r], shape.style());
        sgn = -1.0;
      } else {
        act = detail::eq_act(pre[r], shape.style());
        slope = detail::eq_slope(pre[r], shape.style());
        sgn = -1.0;
      }
      if (!dp.empty()) dp[shape.lambda_offset(head) + r] += sgn * (upstream * act);
      dpre[r] = sgn * lam[r] * (upstream * slope);
    }
    const std::size_t n = hs.basis->size();
    const double* coeff = p.data() + shape.coeff_offset(head);
    if (!dp.empty()) {
      S* dc = dp.data() + shape.coeff_offset(head);
      for (std::size_t r = 0; r < hs.rows; ++r) {
        if (is_exact_zero(dpre[r])) continue;
        for (std::size_t j = 0; j < n; ++j) dc[r * n + j] += dpre[r] * mono[j];
      }
      if (shape.with_bias()) {
        S* db = dp.data() + shape.bias_offset(head);
        for (std::size_t r = 0; r < hs.rows; ++r) db[r] += dpre[r];
      }
    }
    if (!dz.empty()) {
      g.assign(n, S(0.0));
      for (std::size_t r = 0; r < hs.rows; ++r) {
        if (is_exact_zero(dpre[r])) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (coeff[r * n + j] != 0.0) g[j] += coeff[r * n + j] * dpre[r];
        }
      }
      hs.basis->accumulate_gradient<S>(z, g, dz);
    }
  }
}

}  // namespace bl

#endif  // BL_BLOCK_HPP_
