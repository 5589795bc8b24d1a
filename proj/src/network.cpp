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

#include "bl/network.hpp"

#include <algorithm>
#include <limits>
#include <memory>

#include "bl/rng.hpp"

namespace bl {

std::string to_string(SkipMode m) {
  switch (m) {
    case SkipMode::kNone:
      return "none";
    case SkipMode::kDense:
      return "dense";
    case SkipMode::kResidual:
      return "residual";
  }
  return "none";
}

std::string to_string(OutputMode m) { return m == OutputMode::kScalar ? "scalar" : "class_vector"; }

SkipMode skip_mode_from_string(const std::string& s) {
  if (s == "none") return SkipMode::kNone;
  if (s == "dense") return SkipMode::kDense;
  if (s == "residual") return SkipMode::kResidual;
  throw ConfigError("unknown skip mode '" + s + "' (expected none, dense or residual)");
}

OutputMode output_mode_from_string(const std::string& s) {
  if (s == "scalar") return OutputMode::kScalar;
  if (s == "class_vector") return OutputMode::kClassVector;
  throw ConfigError("unknown output mode '" + s + "' (expected scalar or class_vector)");
}

namespace {

HeadShape make_head(const HeadArch& arch, std::size_t input_dim, bool restrict,
                    std::size_t y_begin, std::size_t y_end) {
  HeadShape hs;
  hs.rows = arch.rank;
  if (arch.rank == 0) return hs;
  if (arch.degree == 0 && arch.extra.empty()) {
    throw ShapeError("head with degree 0 needs an explicit monomial list");
  }
  MonomialBasis basis = MonomialBasis::augmented(input_dim, arch.degree, true, arch.extra);
  if (restrict) basis = basis.restricted_to(y_begin, y_end);
  hs.basis = std::make_shared<const MonomialBasis>(std::move(basis));
  return hs;
}

}  // namespace

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  if (spec_.layers.empty()) throw ShapeError("network needs at least one layer");
  if (spec_.x_dim == 0 && spec_.mode == OutputMode::kClassVector) {
    throw ShapeError("class-vector mode needs x_dim >= 1");
  }
  if (spec_.mode == OutputMode::kClassVector) {
    if (spec_.n_classes < 2) throw ShapeError("class-vector mode needs at least 2 classes");
    if (spec_.y_dim != 0) throw ShapeError("class-vector mode has no continuous response");
    input_dim_ = spec_.x_dim;
    output_dim_ = spec_.n_classes;
  } else {
    if (spec_.n_classes == 1) throw ShapeError("a discrete response needs at least 2 classes");
    if (spec_.response_dim() == 0) throw ShapeError("scalar mode needs a response dimension");
    input_dim_ = spec_.x_dim + spec_.response_dim();
    output_dim_ = 1;
  }
  if (spec_.style == HeadStyle::kIBL) {
    if (spec_.readout_bias.value_or(false)) {
      throw ConfigError("IBL networks have a bias-free readout");
    }
    if (spec_.identity_utility) throw ConfigError("IBL requires the tanh utility head");
  }
  readout_bias_ = spec_.readout_bias.value_or(spec_.style == HeadStyle::kBL);
  const bool with_bias = spec_.style == HeadStyle::kBL;

  std::size_t off = 0;
  std::size_t dense_width = input_dim_;
  const std::size_t L = spec_.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    const LayerArch& la = spec_.layers[l];
    if (la.width == 0) throw ShapeError("layer " + std::to_string(l + 1) + " has width 0");
    std::size_t in_dim = input_dim_;
    if (l > 0) in_dim = spec_.skip == SkipMode::kDense ? dense_width : spec_.layers[l - 1].width;
    layer_in_.push_back(in_dim);
    const bool restrict = spec_.style == HeadStyle::kIBL && spec_.restrict_y && l == 0 &&
                          spec_.mode == OutputMode::kScalar;
    const std::size_t yb = spec_.x_dim;
    const std::size_t ye = spec_.x_dim + spec_.response_dim();
    shapes_.emplace_back(in_dim, make_head(la.u, in_dim, restrict, yb, ye),
                         make_head(la.c, in_dim, restrict, yb, ye),
                         make_head(la.t, in_dim, restrict, yb, ye), with_bias, spec_.style,
                         spec_.identity_utility);
    const BlockShape& shape = shapes_.back();
    block_off_.emplace_back();
    for (std::size_t i = 0; i < la.width; ++i) {
      block_off_[l].push_back(off);
      std::size_t lam = off;
      lambda_ranges_.emplace_back(lam, lam + shape.lambda_count());
      off += shape.param_count();
    }
    dense_width += la.width;
  }
  proj_off_.assign(L, std::nullopt);
  if (spec_.skip == SkipMode::kResidual) {
    for (std::size_t l = 1; l < L; ++l) {
      if (width(l) != width(l - 1)) {
        proj_off_[l] = off;
        off += width(l) * width(l - 1);
      }
    }
  }
  readout_off_ = off;
  off += output_dim_ * width(L - 1);
  readout_bias_off_ = off;
  if (readout_bias_) off += output_dim_;
  params_.assign(off, 0.0);
}

void Network::project_lambdas() {
  for (auto [b, e] : lambda_ranges_) {
    for (std::size_t k = b; k < e; ++k) params_[k] = std::max(params_[k], 0.0);
  }
}

std::vector<double> Network::assemble_input(std::span<const double> x,
                                            std::span<const double> y) const {
  if (x.size() != spec_.x_dim) {
    throw ShapeError("expected x of length " + std::to_string(spec_.x_dim) + ", got " +
                     std::to_string(x.size()));
  }
  if (y.size() != response_dim()) {
    throw ShapeError("expected y of length " + std::to_string(response_dim()) + ", got " +
                     std::to_string(y.size()));
  }
  std::vector<double> z(x.begin(), x.end());
  z.insert(z.end(), y.begin(), y.end());
  for (double v : z) {
    if (!std::isfinite(v)) throw NumericError("non-finite network input");
  }
  return z;
}

void initialize(Network& net, std::uint64_t seed, const InitConfig& cfg) {
  NormalStream normal(stream_key(seed, {0x1a17}));
  auto p = net.params();
  std::fill(p.begin(), p.end(), 0.0);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const BlockShape& shape = net.block_shape(l);
    for (std::size_t i = 0; i < net.width(l); ++i) {
      auto bp = net.block_params(l, i);
      const std::size_t nlam = shape.lambda_count();
      for (std::size_t k = 0; k < nlam; ++k) {
        bp[k] = std::max(0.0, cfg.lambda_mean + cfg.sigma_lambda * normal());
      }
      for (std::size_t k = nlam; k < bp.size(); ++k) bp[k] = cfg.sigma_params * normal();
    }
  }
  for (std::size_t l = 1; l < net.depth(); ++l) {
    if (!net.has_projection(l)) continue;
    const std::size_t n = net.width(l) * net.width(l - 1);
    for (std::size_t k = 0; k < n; ++k) p[net.projection_offset(l) + k] = 0.01 * normal();
  }
  const double d = static_cast<double>(net.width(net.depth() - 1));
  auto w = net.readout_weight();
  for (double& v : w) {
    v = net.mode() == OutputMode::kScalar ? 1.0 / d + cfg.sigma_params * normal()
                                          : normal() / std::sqrt(d);
  }
}

std::vector<double> forward(const Network& net, std::span<const double> x,
                            std::span<const double> y) {
  const auto z = net.assemble_input(x, y);
  NetworkWorkspace<double> ws;
  network_forward<double>(net, z, ws);
  return ws.out;
}

void score_into(const Network& net, std::span<const double> z, NetworkWorkspace<double>& ws,
                std::span<double> out) {
  if (net.mode() != OutputMode::kScalar) throw ModeError("score_y requires scalar output mode");
  network_forward<double>(net, z, ws);
  const double one = 1.0;
  network_backward<double>(net, ws, std::span<const double>(&one, 1), {}, true);
  std::copy(ws.dz.begin() + static_cast<std::ptrdiff_t>(net.x_dim()), ws.dz.end(), out.begin());
}

std::vector<double> score_y(const Network& net, std::span<const double> x,
                            std::span<const double> y) {
  if (net.mode() != OutputMode::kScalar) throw ModeError("score_y requires scalar output mode");
  const auto z = net.assemble_input(x, y);
  NetworkWorkspace<double> ws;
  std::vector<double> out(net.response_dim());
  score_into(net, z, ws, out);
  return out;
}

NetworkGradient backward(const Network& net, std::span<const double> x, std::span<const double> y,
                         std::span<const double> upstream) {
  if (upstream.size() != net.output_dim()) {
    throw ShapeError("upstream length " + std::to_string(upstream.size()) +
                     " does not match network output " + std::to_string(net.output_dim()));
  }
  const auto z = net.assemble_input(x, y);
  NetworkWorkspace<double> ws;
  network_forward<double>(net, z, ws);
  NetworkGradient g(net.param_count(), 0.0);
  network_backward<double>(net, ws, upstream, g, false);
  return g;
}

std::vector<double> input_gradient(const Network& net, std::span<const double> x,
                                   std::span<const double> y, std::span<const double> upstream) {
  if (upstream.size() != net.output_dim()) throw ShapeError("upstream length mismatch");
  const auto z = net.assemble_input(x, y);
  NetworkWorkspace<double> ws;
  network_forward<double>(net, z, ws);
  network_backward<double>(net, ws, upstream, {}, true);
  return ws.dz;
}

double kink_distance(const Network& net, std::span<const double> x, std::span<const double> y) {
  double best = std::numeric_limits<double>::infinity();
  if (net.style() != HeadStyle::kBL) return best;
  const auto z = net.assemble_input(x, y);
  NetworkWorkspace<double> ws;
  network_forward<double>(net, z, ws);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    for (const auto& c : ws.cache[l]) {
      for (int h = 1; h < 3; ++h) {
        for (double a : c.pre[h]) best = std::min(best, std::abs(a));
      }
    }
  }
  return best;
}

}  // namespace bl
