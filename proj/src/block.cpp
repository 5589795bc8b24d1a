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

#include "bl/block.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "bl/error.hpp"

namespace bl {

std::string to_string(HeadStyle s) { return s == HeadStyle::kBL ? "BL" : "IBL"; }

HeadStyle head_style_from_string(const std::string& s) {
  if (s == "BL") return HeadStyle::kBL;
  if (s == "IBL") return HeadStyle::kIBL;
  throw ConfigError("unknown head style '" + s + "' (expected BL or IBL)");
}

BlockShape::BlockShape(std::size_t input_dim, HeadShape u, HeadShape c, HeadShape t,
                       bool with_bias, HeadStyle style, bool identity_utility)
    : input_dim_(input_dim),
      heads_{std::move(u), std::move(c), std::move(t)},
      with_bias_(with_bias),
      style_(style),
      identity_utility_(identity_utility) {
  std::size_t total_rows = 0;
  for (auto& h : heads_) {
    if (h.rows > 0 && !h.basis) throw ShapeError("block head with rows but no basis");
    if (h.rows > 0 && h.basis->input_dim() != input_dim_) {
      throw ShapeError("block heads must share the block input dimension");
    }
    if (h.rows == 0) h.basis.reset();
    total_rows += h.rows;
  }
  if (total_rows == 0) throw ShapeError("block has every head dropped");
  std::size_t off = 0;
  for (int h = 0; h < 3; ++h) {
    lambda_off_[h] = off;
    off += heads_[h].rows;
  }
  for (int h = 0; h < 3; ++h) {
    coeff_off_[h] = off;
    off += heads_[h].rows * (heads_[h].basis ? heads_[h].basis->size() : 0);
    bias_off_[h] = off;
    if (with_bias_) off += heads_[h].rows;
  }
  param_count_ = off;
}

MapView BlockShape::map_view(Head h, std::span<const double> params) const {
  const HeadShape& hs = head(h);
  const std::size_t n = hs.basis ? hs.basis->size() : 0;
  MapView v;
  v.basis = hs.basis.get();
  v.rows = hs.rows;
  v.coeff = params.subspan(coeff_offset(h), hs.rows * n);
  if (with_bias_) v.bias = params.subspan(bias_offset(h), hs.rows);
  return v;
}

bool BlockShape::operator==(const BlockShape& o) const {
  if (input_dim_ != o.input_dim_ || with_bias_ != o.with_bias_ || style_ != o.style_ ||
      identity_utility_ != o.identity_utility_) {
    return false;
  }
  for (int h = 0; h < 3; ++h) {
    if (heads_[h].rows != o.heads_[h].rows) return false;
    if (heads_[h].rows > 0 && !(*heads_[h].basis == *o.heads_[h].basis)) return false;
  }
  return true;
}

BlockShape make_block_shape(std::size_t input_dim, std::size_t r_u, int deg_u, std::size_t r_c,
                            int deg_c, std::size_t r_t, int deg_t, HeadStyle style,
                            bool with_bias) {
  auto head = [&](std::size_t rows, int deg) {
    HeadShape hs;
    hs.rows = rows;
    if (rows > 0) {
      hs.basis = std::make_shared<const MonomialBasis>(MonomialBasis::complete(input_dim, deg, true));
    }
    return hs;
  };
  return BlockShape(input_dim, head(r_u, deg_u), head(r_c, deg_c), head(r_t, deg_t), with_bias,
                    style);
}

namespace {

void check_input(const BlockShape& shape, std::span<const double> params,
                 std::span<const double> z) {
  if (params.size() != shape.param_count()) {
    throw ShapeError("block expects " + std::to_string(shape.param_count()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  if (z.size() != shape.input_dim()) {
    throw ShapeError("block expects input of length " + std::to_string(shape.input_dim()) +
                     ", got " + std::to_string(z.size()));
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw NumericError("non-finite block input");
  }
}

}  // namespace

double eval_block(const BlockShape& shape, std::span<const double> params,
                  std::span<const double> z) {
  check_input(shape, params, z);
  BlockCache<double> cache;
  return block_forward<double>(shape, params, z, cache);
}

std::vector<double> block_grad_input(const BlockShape& shape, std::span<const double> params,
                                     std::span<const double> z) {
  check_input(shape, params, z);
  BlockCache<double> cache;
  block_forward<double>(shape, params, z, cache);
  std::vector<double> dz(z.size(), 0.0);
  block_backward<double>(shape, params, z, cache, 1.0, dz, {});
  return dz;
}

std::vector<double> block_grad_params(const BlockShape& shape, std::span<const double> params,
                                      std::span<const double> z, double upstream) {
  check_input(shape, params, z);
  BlockCache<double> cache;
  block_forward<double>(shape, params, z, cache);
  std::vector<double> dp(params.size(), 0.0);
  block_backward<double>(shape, params, z, cache, upstream, {}, dp);
  return dp;
}

double kink_distance(const BlockShape& shape, std::span<const double> params,
                     std::span<const double> z) {
  double best = std::numeric_limits<double>::infinity();
  if (shape.style() != HeadStyle::kBL) return best;
  BlockCache<double> cache;
  block_forward<double>(shape, params, z, cache);
  for (int h = 1; h < 3; ++h) {
    for (double a : cache.pre[h]) best = std::min(best, std::abs(a));
  }
  return best;
}

}  // namespace bl
