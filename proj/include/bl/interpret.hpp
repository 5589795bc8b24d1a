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

#ifndef BL_INTERPRET_HPP_
#define BL_INTERPRET_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bl/block.hpp"
#include "bl/network.hpp"

namespace bl {

// One retained polynomial term. The head bias appears as the all-zero exponent.
struct Term {
  Exponent exponent;
  double coeff = 0.0;
  std::string label;
};

// Top-k simplification of one head row.
struct RowSummary {
  std::vector<Term> terms;
  double residual = 0.0;  // sum of |omitted coefficients|
};

struct SymbolicUMP {
  HeadStyle style = HeadStyle::kBL;
  std::size_t k = 0;
  std::vector<RowSummary> objective;   // utility rows
  std::vector<RowSummary> inequality;  // C rows
  std::vector<RowSummary> equality;    // T rows
  std::array<double, 3> residual_norm{};  // per head, summed over rows
  std::array<std::vector<double>, 3> lambdas;
  std::vector<std::string> feature_names;
};

// "x1", "x2", ... then "e1".."em" for a one-hot class prefix and "y1".. for
// continuous responses; empty name lists fall back to these defaults.
std::vector<std::string> network_input_names(const Network& net,
                                             std::span<const std::string> x_names = {},
                                             std::span<const std::string> y_names = {});
// Input labels seen by the blocks of `layer` (0-based).
std::vector<std::string> layer_input_names(const Network& net, std::size_t layer,
                                           std::span<const std::string> base_names);
std::string block_name(std::size_t layer, std::size_t block);  // 0-based in, "L1B1" out

std::string monomial_label(const Exponent& e, std::span<const std::string> names);

// Candidates per row are the basis monomials plus the bias when present, so
// k ranges over [1, candidate count].
std::size_t candidate_count(const BlockShape& shape);

SymbolicUMP extract_ump(const BlockShape& shape, std::span<const double> params,
                        std::span<const std::string> names, std::size_t k);
inline SymbolicUMP extract_ump(const BlockParams& block, std::span<const std::string> names,
                               std::size_t k) {
  return extract_ump(block.shape, block.values, names, k);
}

// Evaluates the retained terms of a row at z (the full-k round trip).
double eval_row(const RowSummary& row, std::span<const double> z);

// UTF-8 plain text: "max  U(x,y) = ... + R̃_u", "s.t.  ... + R̃_c ≤ 0", "... + R̃_t = 0".
std::string render_ump(const SymbolicUMP& ump);

enum class QuotientMode { kSymmetry, kScale };
std::string to_string(QuotientMode m);
QuotientMode quotient_mode_from_string(const std::string& s);

inline constexpr double kDeadAtomThreshold = 1e-10;
inline constexpr double kDuplicateAtomTolerance = 1e-9;

struct CanonicalForm {
  Network net;
  QuotientMode mode = QuotientMode::kSymmetry;
  double scale = 1.0;  // readout divisor (scale mode)
  std::vector<std::string> warnings;
  std::span<const double> params() const { return net.params(); }
};

// T-row sign normalization, dead-atom pruning, atom and block sorting (with
// the matching permutations pushed into later layers, projections and the
// readout); scale mode also divides the readout by its largest |weight|.
CanonicalForm canonicalize(const Network& net, QuotientMode mode);

// Same architecture and canonical parameters equal within tol componentwise.
bool equivalent(const Network& a, const Network& b, QuotientMode mode, double tol);

struct GraphOptions {
  double threshold = 0.3;
  std::vector<std::string> x_names;
  std::vector<std::string> y_names;
};
std::string export_graph(const Network& net, const GraphOptions& opt);

}  // namespace bl

#endif  // BL_INTERPRET_HPP_
