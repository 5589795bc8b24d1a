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

#ifndef BL_NETWORK_HPP_
#define BL_NETWORK_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bl/block.hpp"
#include "bl/error.hpp"
#include "bl/poly.hpp"

namespace bl {

enum class SkipMode { kNone, kDense, kResidual };
// kScalar: one compositional utility per (x, y); discrete classes, if any,
// enter y as a one-hot prefix and are scored by candidate stacking.
// kClassVector: blocks see x only and the readout has one row per class.
enum class OutputMode { kScalar, kClassVector };

std::string to_string(SkipMode m);
std::string to_string(OutputMode m);
SkipMode skip_mode_from_string(const std::string& s);
OutputMode output_mode_from_string(const std::string& s);

struct HeadArch {
  std::size_t rank = 1;
  int degree = 1;                 // 0 = use only `extra`
  std::vector<Exponent> extra;    // appended monomials
};

struct LayerArch {
  std::size_t width = 1;
  HeadArch u;
  HeadArch c;
  HeadArch t;
};

struct NetworkSpec {
  std::size_t x_dim = 1;
  std::size_t y_dim = 0;      // continuous response coordinates
  std::size_t n_classes = 0;  // discrete response candidates
  OutputMode mode = OutputMode::kScalar;
  HeadStyle style = HeadStyle::kBL;
  SkipMode skip = SkipMode::kNone;
  bool identity_utility = false;
  std::optional<bool> readout_bias;  // default: on for BL, off for IBL
  // IBL: layer-1 heads keep only monomials with a response factor.
  bool restrict_y = true;
  std::vector<LayerArch> layers;

  std::size_t response_dim() const { return mode == OutputMode::kScalar ? n_classes + y_dim : 0; }
};

// Layered stacks of blocks with optional skips and an affine readout.
// All parameters live in one flat vector in a fixed order: blocks (layer by
// layer, block by block), residual projections, readout weight (row-major),
// readout bias.
class Network {
 public:
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  HeadStyle style() const { return spec_.style; }
  SkipMode skip() const { return spec_.skip; }
  OutputMode mode() const { return spec_.mode; }
  std::size_t x_dim() const { return spec_.x_dim; }
  std::size_t response_dim() const { return spec_.response_dim(); }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }

  std::size_t depth() const { return spec_.layers.size(); }
  std::size_t width(std::size_t layer) const { return spec_.layers[layer].width; }
  std::size_t layer_input_dim(std::size_t layer) const { return layer_in_[layer]; }
  const BlockShape& block_shape(std::size_t layer) const { return shapes_[layer]; }
  std::size_t block_offset(std::size_t layer, std::size_t block) const {
    return block_off_[layer][block];
  }
  std::span<double> block_params(std::size_t layer, std::size_t block) {
    return {params_.data() + block_offset(layer, block), shapes_[layer].param_count()};
  }
  std::span<const double> block_params(std::size_t layer, std::size_t block) const {
    return {params_.data() + block_offset(layer, block), shapes_[layer].param_count()};
  }

  // Learnable projection for residual layer `layer` (>= 1) when widths differ.
  bool has_projection(std::size_t layer) const { return proj_off_[layer].has_value(); }
  std::size_t projection_offset(std::size_t layer) const { return *proj_off_[layer]; }

  std::size_t readout_offset() const { return readout_off_; }
  bool has_readout_bias() const { return readout_bias_; }
  std::size_t readout_bias_offset() const { return readout_bias_off_; }
  std::span<double> readout_weight() {
    return {params_.data() + readout_off_, output_dim_ * width(depth() - 1)};
  }
  std::span<const double> readout_weight() const {
    return {params_.data() + readout_off_, output_dim_ * width(depth() - 1)};
  }
  std::span<double> readout_bias() {
    return {params_.data() + readout_bias_off_, readout_bias_ ? output_dim_ : 0};
  }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  // [begin, end) ranges of every lambda entry in the flat parameter vector.
  const std::vector<std::pair<std::size_t, std::size_t>>& lambda_ranges() const {
    return lambda_ranges_;
  }
  void project_lambdas();

  // [x; onehot/y] in scalar mode, x in class-vector mode.
  std::vector<double> assemble_input(std::span<const double> x, std::span<const double> y) const;

 private:
  NetworkSpec spec_;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::vector<std::size_t> layer_in_;
  std::vector<BlockShape> shapes_;
  std::vector<std::vector<std::size_t>> block_off_;
  std::vector<std::optional<std::size_t>> proj_off_;
  std::size_t readout_off_ = 0;
  bool readout_bias_ = false;
  std::size_t readout_bias_off_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> lambda_ranges_;
  std::vector<double> params_;
};

using NetworkGradient = std::vector<double>;

template <class S>
struct NetworkWorkspace;

struct InitConfig {
  double sigma_params = 0.01;
  double lambda_mean = 1.0;
  double sigma_lambda = 0.01;
};

void initialize(Network& net, std::uint64_t seed, const InitConfig& cfg = {});

std::vector<double> forward(const Network& net, std::span<const double> x,
                            std::span<const double> y);
// Gradient of the scalar utility w.r.t. the full response vector y.
std::vector<double> score_y(const Network& net, std::span<const double> x,
                            std::span<const double> y);
NetworkGradient backward(const Network& net, std::span<const double> x, std::span<const double> y,
                         std::span<const double> upstream);
// Score at an assembled input z, reusing ws; writes grad_y BL into out
// (length response_dim). score_y and the Langevin sampler both go through here.
void score_into(const Network& net, std::span<const double> z, NetworkWorkspace<double>& ws,
                std::span<double> out);

// Gradient of upstream . forward w.r.t. the assembled input vector.
std::vector<double> input_gradient(const Network& net, std::span<const double> x,
                                   std::span<const double> y, std::span<const double> upstream);

// Smallest |pre-activation| of any relu/abs head over the whole network at
// (x, y); infinity for IBL.
double kink_distance(const Network& net, std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Generic kernels (double and Dual).

template <class S>
struct NetworkWorkspace {
  std::vector<std::vector<S>> in;
  std::vector<std::vector<S>> s;
  std::vector<std::vector<BlockCache<S>>> cache;
  std::vector<S> out;
  std::vector<std::vector<S>> ds;
  std::vector<S> din;
  std::vector<S> dz;
};

template <class S>
void network_forward(const Network& net, std::span<const S> z, NetworkWorkspace<S>& ws) {
  const std::size_t L = net.depth();
  const auto p = net.params();
  ws.in.resize(L);
  ws.s.resize(L);
  ws.cache.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    auto& in = ws.in[l];
    if (l == 0) {
      in.assign(z.begin(), z.end());
    } else if (net.skip() == SkipMode::kDense) {
      in.assign(z.begin(), z.end());
      for (std::size_t j = 0; j < l; ++j) in.insert(in.end(), ws.s[j].begin(), ws.s[j].end());
    } else {
      in = ws.s[l - 1];
    }
    const std::size_t w = net.width(l);
    auto& s = ws.s[l];
    s.assign(w, S(0.0));
    ws.cache[l].resize(w);
    const BlockShape& shape = net.block_shape(l);
    for (std::size_t i = 0; i < w; ++i) {
      s[i] = block_forward<S>(shape, net.block_params(l, i), in, ws.cache[l][i]);
    }
    if (net.skip() == SkipMode::kResidual && l > 0) {
      const auto& prev = ws.s[l - 1];
      if (net.has_projection(l)) {
        const double* pr = p.data() + net.projection_offset(l);
        for (std::size_t a = 0; a < w; ++a) {
          for (std::size_t b = 0; b < prev.size(); ++b) s[a] += pr[a * prev.size() + b] * prev[b];
        }
      } else {
        for (std::size_t a = 0; a < w; ++a) s[a] += prev[a];
      }
    }
    for (const S& v : s) {
      if (!std::isfinite(value_of(v))) {
        throw NumericError("non-finite activation in layer " + std::to_string(l + 1));
      }
    }
  }
  const auto& top = ws.s[L - 1];
  const std::size_t m = net.output_dim();
  const double* W = p.data() + net.readout_offset();
  ws.out.assign(m, S(0.0));
  for (std::size_t k = 0; k < m; ++k) {
    S acc = net.has_readout_bias() ? S(p[net.readout_bias_offset() + k]) : S(0.0);
    for (std::size_t j = 0; j < top.size(); ++j) acc += W[k * top.size() + j] * top[j];
    ws.out[k] = acc;
  }
}

// Requires a preceding network_forward on ws. Accumulates into dp when
// non-empty; fills ws.dz with the input gradient when want_input is set.
template <class S>
void network_backward(const Network& net, NetworkWorkspace<S>& ws, std::span<const S> upstream,
                      std::span<S> dp, bool want_input) {
  const std::size_t L = net.depth();
  const auto p = net.params();
  const std::size_t m = net.output_dim();
  const std::size_t wl = net.width(L - 1);
  ws.ds.resize(L);
  for (std::size_t l = 0; l < L; ++l) ws.ds[l].assign(net.width(l), S(0.0));
  ws.dz.assign(net.input_dim(), S(0.0));

  const double* W = p.data() + net.readout_offset();
  const auto& top = ws.s[L - 1];
  for (std::size_t k = 0; k < m; ++k) {
    if (!dp.empty()) {
      for (std::size_t j = 0; j < wl; ++j) dp[net.readout_offset() + k * wl + j] += upstream[k] * top[j];
      if (net.has_readout_bias()) dp[net.readout_bias_offset() + k] += upstream[k];
    }
    for (std::size_t j = 0; j < wl; ++j) ws.ds[L - 1][j] += W[k * wl + j] * upstream[k];
  }

  for (std::size_t l = L; l-- > 0;) {
    const BlockShape& shape = net.block_shape(l);
    const auto& in = ws.in[l];
    const bool need_din = l > 0 || want_input;
    ws.din.assign(need_din ? in.size() : 0, S(0.0));
    for (std::size_t i = 0; i < net.width(l); ++i) {
      const S& up = ws.ds[l][i];
      if (is_exact_zero(up)) continue;
      std::span<S> dpb;
      if (!dp.empty()) dpb = dp.subspan(net.block_offset(l, i), shape.param_count());
      block_backward<S>(shape, net.block_params(l, i), in, ws.cache[l][i], up,
                        need_din ? std::span<S>(ws.din) : std::span<S>(), dpb);
    }
    if (net.skip() == SkipMode::kResidual && l > 0) {
      const auto& prev = ws.s[l - 1];
      auto& dprev = ws.ds[l - 1];
      const auto& dcur = ws.ds[l];
      if (net.has_projection(l)) {
        const std::size_t off = net.projection_offset(l);
        const double* pr = p.data() + off;
        for (std::size_t a = 0; a < dcur.size(); ++a) {
          for (std::size_t b = 0; b < prev.size(); ++b) {
            if (!dp.empty()) dp[off + a * prev.size() + b] += dcur[a] * prev[b];
            dprev[b] += pr[a * prev.size() + b] * dcur[a];
          }
        }
      } else {
        for (std::size_t a = 0; a < dcur.size(); ++a) dprev[a] += dcur[a];
      }
    }
    if (!need_din) continue;
    if (l == 0) {
      for (std::size_t k = 0; k < ws.din.size(); ++k) ws.dz[k] += ws.din[k];
    } else if (net.skip() == SkipMode::kDense) {
      const std::size_t nz = net.input_dim();
      if (want_input) {
        for (std::size_t k = 0; k < nz; ++k) ws.dz[k] += ws.din[k];
      }
      std::size_t off = nz;
      for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t k = 0; k < net.width(j); ++k) ws.ds[j][k] += ws.din[off + k];
        off += net.width(j);
      }
    } else {
      for (std::size_t k = 0; k < ws.din.size(); ++k) ws.ds[l - 1][k] += ws.din[k];
    }
  }
}

}  // namespace bl

#endif  // BL_NETWORK_HPP_
