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

// Run configuration: one JSON document with sections model, loss, train,
// data and diagnostic. Unknown keys and bad values are ConfigErrors naming
// the offending key.
#ifndef BL_CONFIG_HPP_
#define BL_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bl/data.hpp"
#include "bl/gibbs.hpp"
#include "bl/network.hpp"
#include "bl/training.hpp"

namespace bl {

struct ModelConfig {
  HeadStyle style = HeadStyle::kBL;
  std::optional<OutputMode> mode;  // default: class vector for pure classification
  SkipMode skip = SkipMode::kNone;
  bool identity_utility = false;
  std::optional<bool> readout_bias;
  bool restrict_y = true;
  double tau = 1.0;
  std::vector<LayerArch> layers{LayerArch{}};
  InitConfig init;
  std::uint64_t seed = 0;
};

struct DataConfig {
  Schema schema;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

struct DiagnosticConfig {
  std::size_t dim = 64;
  std::vector<double> lambda_sweep{0, 1, 3, 10, 30, 100, 200, 500};
  std::vector<double> tau_sweep{2.0, 1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005};
  double fixed_lambda = 25.0;  // lambda used by the tau sweep
  double fixed_tau = 0.05;     // tau used by the lambda sweep
  double eta = 1e-4;
  std::size_t steps = 1500;
  std::size_t burn_in = 500;
  std::size_t chains = 512;
  double eps_tol = 0.1;
  std::uint64_t seed = 0;
  ResidualScale residual = ResidualScale::kSum;
  void validate() const;
};

struct RunConfig {
  ModelConfig model;
  LossConfig loss;
  TrainConfig train;
  DataConfig data;
  DiagnosticConfig diagnostic;
  std::vector<std::string> warnings;  // values outside the usual tuning ranges
  std::string digest;                 // FNV-1a of the source bytes
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Network spec for the configured model over data with the given encoded
// feature count, class count (0 = none) and continuous target count.
NetworkSpec network_spec(const ModelConfig& m, std::size_t x_dim, std::size_t n_classes,
                         std::size_t y_dim);

}  // namespace bl

#endif  // BL_CONFIG_HPP_
