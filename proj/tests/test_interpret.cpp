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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "bl/error.hpp"
#include "bl/interpret.hpp"
#include "support/fixtures.hpp"

namespace bl {
namespace {

using testing::RandomNetOptions;

// Degree-2 utility head over price P and rooms RM.
BlockParams housing_block() {
  BlockParams b(make_block_shape(2, 1, 2, 0, 1, 0, 1, HeadStyle::kBL, true));
  const auto& basis = *b.shape.head(Head::kU).basis;
  auto c = b.coeff(Head::kU);
  c[*basis.index_of({2, 0})] = -0.56;
  c[*basis.index_of({0, 1})] = -0.60;
  c[*basis.index_of({1, 1})] = 0.57;
  c[*basis.index_of({1, 0})] = 0.05;
  c[*basis.index_of({0, 2})] = -0.08;
  b.bias(Head::kU)[0] = 0.02;
  b.lambda(Head::kU)[0] = 1.0;
  return b;
}

const std::vector<std::string> kHousingNames{"P", "RM"};

TEST(Extract, HousingTopThree) {
  const auto ump = extract_ump(housing_block(), kHousingNames, 3);
  ASSERT_EQ(ump.objective.size(), 1u);
  const auto& terms = ump.objective[0].terms;
  ASSERT_EQ(terms.size(), 3u);
  std::set<std::string> labels;
  for (const auto& t : terms) labels.insert(t.label);
  EXPECT_EQ(labels, (std::set<std::string>{"P^2", "RM", "P·RM"}));
  EXPECT_NEAR(ump.objective[0].residual, 0.05 + 0.08 + 0.02, 1e-15);
  EXPECT_NEAR(ump.residual_norm[0], 0.15, 1e-15);
  const std::string text = render_ump(ump);
  EXPECT_NE(text.find("max  U(x,y) = -0.60·RM + 0.57·P·RM - 0.56·P^2 + R̃_u"), std::string::npos) << text;
}

TEST(Extract, ZeroHeadIsEmpty) {
  BlockParams b(make_block_shape(3, 1, 2, 1, 1, 1, 1, HeadStyle::kBL, true));
  const std::vector<std::string> names{"a", "b", "c"};
  for (std::size_t k = 1; k <= candidate_count(b.shape); ++k) {
    const auto ump = extract_ump(b, names, k);
    for (const auto* rows : {&ump.objective, &ump.inequality, &ump.equality}) {
      for (const auto& r : *rows) {
        EXPECT_TRUE(r.terms.empty());
        EXPECT_EQ(r.residual, 0.0);
      }
    }
  }
}

TEST(Extract, NameCountMismatchThrows) {
  EXPECT_THROW(extract_ump(housing_block(), std::vector<std::string>{"P"}, 2), ShapeError);
  EXPECT_THROW(extract_ump(housing_block(), kHousingNames, 0), ConfigError);
}

TEST(Extract, TieBreakPrefersEarlierBasisIndex) {
  BlockParams b(make_block_shape(2, 1, 1, 0, 1, 0, 1, HeadStyle::kIBL, false));
  auto c = b.coeff(Head::kU);
  c[0] = 0.5;
  c[1] = -0.5;
  const auto ump = extract_ump(b, std::vector<std::string>{"a", "b"}, 1);
  ASSERT_EQ(ump.objective[0].terms.size(), 1u);
  EXPECT_EQ(ump.objective[0].terms[0].label, "a");
}

// Pre-activation oracle straight from the basis and the coefficient layout.
double head_preactivation(const BlockParams& b, Head h, std::size_t r, std::span<const double> z) {
  const auto& hs = b.shape.head(h);
  const std::size_t n = hs.basis->size();
  std::vector<double> m(n);
  hs.basis->eval<double>(z, m);
  double acc = b.shape.with_bias() ? b.values[b.shape.bias_offset(h) + r] : 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += b.values[b.shape.coeff_offset(h) + r * n + j] * m[j];
  return acc;
}

TEST(Extract, FullBudgetRoundTrip) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto style = trial % 2 ? HeadStyle::kIBL : HeadStyle::kBL;
    BlockParams b(make_block_shape(3, 2, 1 + trial % 3, 1, 2, 2, 1 + trial % 2, style, style == HeadStyle::kBL));
    b.values = testing::gaussian_vector(rng, b.values.size());
    const std::vector<std::string> names{"a", "b", "c"};
    const auto ump = extract_ump(b, names, candidate_count(b.shape));
    for (double r : ump.residual_norm) EXPECT_EQ(r, 0.0);
    const std::vector<RowSummary>* rows[3] = {&ump.objective, &ump.inequality, &ump.equality};
    for (int probe = 0; probe < 100; ++probe) {
      const auto z = testing::gaussian_vector(rng, 3);
      for (int h = 0; h < 3; ++h) {
        for (std::size_t r = 0; r < rows[h]->size(); ++r) {
          EXPECT_NEAR(eval_row((*rows[h])[r], z), head_preactivation(b, static_cast<Head>(h), r, z), 1e-9);
        }
      }
    }
  }
}

TEST(Extract, ResidualAccounting) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    BlockParams b(make_block_shape(3, 2, 2, 1, 2, 1, 2, HeadStyle::kBL, true));
    b.values = testing::gaussian_vector(rng, b.values.size());
    const std::size_t k = 1 + static_cast<std::size_t>(trial) % candidate_count(b.shape);
    const auto ump = extract_ump(b, std::vector<std::string>{"a", "b", "c"}, k);
    const std::vector<RowSummary>* rows[3] = {&ump.objective, &ump.inequality, &ump.equality};
    for (int h = 0; h < 3; ++h) {
      const Head head = static_cast<Head>(h);
      double total = 0.0;
      for (double v : b.coeff(head)) total += std::abs(v);
      for (double v : b.bias(head)) total += std::abs(v);
      double kept = 0.0;
      for (const auto& r : *rows[h]) {
        EXPECT_LE(r.terms.size(), k);
        for (const auto& t : r.terms) kept += std::abs(t.coeff);
      }
      EXPECT_NEAR(kept + ump.residual_norm[h], total, 1e-12);
      EXPECT_GE(ump.residual_norm[h], 0.0);
    }
  }
}

TEST(Render, ConstraintLines) {
  BlockParams b(make_block_shape(2, 1, 1, 1, 1, 1, 1, HeadStyle::kBL, false));
  b.coeff(Head::kU)[0] = 1.0;
  b.coeff(Head::kC)[1] = -2.0;
  b.coeff(Head::kT)[0] = 0.5;
  b.coeff(Head::kT)[1] = 0.25;
  const auto text = render_ump(extract_ump(b, std::vector<std::string>{"x", "y"}, 2));
  EXPECT_NE(text.find("max  U(x,y) = 1.00·x + R̃_u\n"), std::string::npos) << text;
  EXPECT_NE(text.find("s.t.  -2.00·y + R̃_c ≤ 0\n"), std::string::npos) << text;
  EXPECT_NE(text.find("      0.50·x + 0.25·y + R̃_t = 0\n"), std::string::npos) << text;
}

std::vector<std::vector<double>> probe_points(const Network& net, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::gaussian_vector(rng, net.input_dim(), 0.8));
  return out;
}

double max_forward_gap(const Network& a, const Network& b, std::size_t probes) {
  double gap = 0.0;
  const std::size_t nx = a.x_dim();
  for (const auto& z : probe_points(a, probes, 77)) {
    const std::span<const double> zs(z);
    const auto fa = forward(a, zs.first(nx), zs.subspan(nx));
    const auto fb = forward(b, zs.first(nx), zs.subspan(nx));
    for (std::size_t k = 0; k < fa.size(); ++k) gap = std::max(gap, std::abs(fa[k] - fb[k]));
  }
  return gap;
}

struct QuotientCase {
  HeadStyle style;
  SkipMode skip;
  OutputMode mode;
  std::vector<std::size_t> widths;
};

class Quotient : public ::testing::TestWithParam<QuotientCase> {
 protected:
  Network make(std::uint64_t seed) const {
    const auto& c = GetParam();
    return testing::random_network({.style = c.style, .skip = c.skip, .mode = c.mode, .x_dim = 2,
                                    .y_dim = c.mode == OutputMode::kScalar ? 1u : 0u,
                                    .n_classes = c.mode == OutputMode::kClassVector ? 3u : 0u,
                                    .degree = 2, .seed = seed, .scale = 0.25, .widths = c.widths});
  }
};

TEST_P(Quotient, SymmetryMovesShareCanonicalForm) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Network net = make(seed);
    Network moved = net;
    testing::flip_t_rows(moved);
    for (std::size_t l = 0; l < moved.depth(); ++l) {
      // identity shortcuts tie a layer's order to the previous one
      const bool tied = l > 0 && moved.skip() == SkipMode::kResidual && !moved.has_projection(l);
      if (moved.width(l) > 1 && !tied) testing::swap_blocks(moved, l, 0, moved.width(l) - 1);
    }
    ASSERT_LE(max_forward_gap(net, moved, 100), 1e-12);
    const auto a = canonicalize(net, QuotientMode::kSymmetry);
    const auto b = canonicalize(moved, QuotientMode::kSymmetry);
    EXPECT_LE(max_forward_gap(a.net, b.net, 10), 1e-12);
    const auto pa = a.params();
    const auto pb = b.params();
    EXPECT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));
    EXPECT_LE(max_forward_gap(net, a.net, 1000), 1e-12);
    EXPECT_TRUE(equivalent(net, moved, QuotientMode::kSymmetry, 1e-12));
  }
}

TEST_P(Quotient, Idempotent) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    for (auto mode : {QuotientMode::kSymmetry, QuotientMode::kScale}) {
      const auto once = canonicalize(make(seed), mode);
      const auto twice = canonicalize(once.net, mode);
      const auto a = once.params();
      const auto b = twice.params();
      EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
      EXPECT_EQ(once.warnings, twice.warnings);
    }
  }
}

TEST_P(Quotient, ScaleModeAbsorbsReadoutRescaling) {
  const Network net = make(21);
  Network scaled = net;
  for (double& v : scaled.readout_weight()) v *= 3.7;
  for (double& v : scaled.readout_bias()) v *= 3.7;
  EXPECT_TRUE(equivalent(net, scaled, QuotientMode::kScale, 1e-12));
  EXPECT_FALSE(equivalent(net, scaled, QuotientMode::kSymmetry, 1e-12));
}

INSTANTIATE_TEST_SUITE_P(
    Architectures, Quotient,
    ::testing::Values(QuotientCase{HeadStyle::kIBL, SkipMode::kNone, OutputMode::kClassVector, {3}},
                      QuotientCase{HeadStyle::kIBL, SkipMode::kNone, OutputMode::kScalar, {3, 2}},
                      QuotientCase{HeadStyle::kIBL, SkipMode::kDense, OutputMode::kClassVector, {2, 3, 2}},
                      QuotientCase{HeadStyle::kIBL, SkipMode::kResidual, OutputMode::kScalar, {3, 3, 2}},
                      QuotientCase{HeadStyle::kIBL, SkipMode::kResidual, OutputMode::kClassVector, {2, 3}},
                      QuotientCase{HeadStyle::kBL, SkipMode::kNone, OutputMode::kClassVector, {3, 2}},
                      QuotientCase{HeadStyle::kBL, SkipMode::kResidual, OutputMode::kScalar, {2, 2}}));

TEST(Canonical, ScaleModeKeepsArgmax) {
  const Network net = testing::random_network({.style = HeadStyle::kIBL, .mode = OutputMode::kClassVector,
                                               .n_classes = 4, .seed = 3});
  const auto c = canonicalize(net, QuotientMode::kScale);
  for (const auto& z : probe_points(net, 100, 5)) {
    const auto a = forward(net, z, {});
    const auto b = forward(c.net, z, {});
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), std::max_element(b.begin(), b.end()) - b.begin());
  }
  double mx = 0.0;
  for (double v : c.net.readout_weight()) mx = std::max(mx, std::abs(v));
  EXPECT_EQ(mx, 1.0);
}

TEST(Canonical, PerturbedCoefficientIsNotEquivalent) {
  const Network net = testing::random_network({.style = HeadStyle::kIBL, .seed = 9});
  Network other = net;
  const double tol = 1e-9;
  const BlockShape& sh = other.block_shape(0);
  other.block_params(0, 1)[sh.coeff_offset(Head::kU)] += 10 * tol;
  ASSERT_GT(max_forward_gap(net, other, 100), 0.0);
  EXPECT_FALSE(equivalent(net, other, QuotientMode::kSymmetry, tol));
  EXPECT_TRUE(equivalent(net, net, QuotientMode::kSymmetry, tol));
}

TEST(Canonical, EquivalenceRelationOnRandomTriples) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Network> nets;
    const Network base = testing::random_network({.style = HeadStyle::kIBL, .depth = 2, .seed = 40u + trial});
    for (int i = 0; i < 3; ++i) {
      Network n = rng() % 2 ? base : testing::random_network({.style = HeadStyle::kIBL, .depth = 2, .seed = 90u + trial});
      if (rng() % 2) testing::flip_t_rows(n);
      if (rng() % 2) testing::swap_blocks(n, 0, 0, 2);
      nets.push_back(std::move(n));
    }
    for (const auto& a : nets) {
      EXPECT_TRUE(equivalent(a, a, QuotientMode::kSymmetry, 1e-12));
      for (const auto& b : nets) {
        EXPECT_EQ(equivalent(a, b, QuotientMode::kSymmetry, 1e-12), equivalent(b, a, QuotientMode::kSymmetry, 1e-12));
        for (const auto& c : nets) {
          if (equivalent(a, b, QuotientMode::kSymmetry, 1e-12) && equivalent(b, c, QuotientMode::kSymmetry, 1e-12)) {
            EXPECT_TRUE(equivalent(a, c, QuotientMode::kSymmetry, 1e-12));
          }
        }
      }
    }
  }
}

TEST(Canonical, DifferentArchitecturesAreInequivalent) {
  const Network a = testing::random_network({.style = HeadStyle::kIBL, .depth = 1});
  const Network b = testing::random_network({.style = HeadStyle::kIBL, .depth = 2});
  EXPECT_FALSE(equivalent(a, b, QuotientMode::kSymmetry, 1.0));
}

TEST(Canonical, AllDeadAtomsAreDegenerate) {
  Network net = testing::random_network({.style = HeadStyle::kIBL});
  for (const auto& [b, e] : net.lambda_ranges()) {
    for (std::size_t i = b; i < e; ++i) net.params()[i] = 1e-12;
  }
  EXPECT_THROW(canonicalize(net, QuotientMode::kSymmetry), DegenerateModelError);
}

TEST(Canonical, DuplicateAtomsWarn) {
  NetworkSpec spec;
  spec.x_dim = 2;
  spec.mode = OutputMode::kClassVector;
  spec.n_classes = 2;
  spec.style = HeadStyle::kIBL;
  spec.layers = {LayerArch{1, {2, 1, {}}, {0, 1, {}}, {0, 1, {}}}};
  Network net(spec);
  initialize(net, 1);
  const BlockShape& sh = net.block_shape(0);
  auto p = net.block_params(0, 0);
  const std::size_t n = sh.head(Head::kU).basis->size();
  for (std::size_t j = 0; j < n; ++j) p[sh.coeff_offset(Head::kU) + n + j] = p[sh.coeff_offset(Head::kU) + j];
  const auto c = canonicalize(net, QuotientMode::kSymmetry);
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_NE(c.warnings[0].find("duplicate"), std::string::npos);
}

std::size_t count_edges(const std::string& dot, const std::string& target = "") {
  std::size_t n = 0;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) {
    const auto arrow = line.find(" -> ");
    if (arrow == std::string::npos) continue;
    if (target.empty() || line.compare(arrow + 4, target.size() + 1, target + " ") == 0) ++n;
  }
  return n;
}

TEST(Graph, InfiniteThresholdHasNoEdges) {
  const Network net = testing::random_network({.style = HeadStyle::kBL, .depth = 2, .skip = SkipMode::kResidual});
  GraphOptions opt;
  opt.threshold = std::numeric_limits<double>::infinity();
  const auto dot = export_graph(net, opt);
  EXPECT_EQ(count_edges(dot), 0u);
  EXPECT_NE(dot.find("L1B1U1"), std::string::npos);
  EXPECT_NE(dot.find("L2B2T1"), std::string::npos);
}

TEST(Graph, ZeroThresholdCountsEveryNonzeroWeight) {
  NetworkSpec spec;
  spec.x_dim = 3;
  spec.mode = OutputMode::kClassVector;
  spec.n_classes = 2;
  spec.layers = {LayerArch{1, {1, 1, {}}, {1, 1, {}}, {1, 1, {}}}};
  Network net(spec);
  initialize(net, 2);
  net.block_params(0, 0)[net.block_shape(0).coeff_offset(Head::kC) + 1] = 0.0;
  std::size_t nonzero = 0;
  const BlockShape& sh = net.block_shape(0);
  const auto p = net.block_params(0, 0);
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    nonzero += p[sh.lambda_offset(head)] != 0.0;
    for (std::size_t j = 0; j < 3; ++j) nonzero += p[sh.coeff_offset(head) + j] != 0.0;
  }
  for (double w : net.readout_weight()) nonzero += w != 0.0;
  GraphOptions opt;
  opt.threshold = 0.0;
  EXPECT_EQ(count_edges(export_graph(net, opt)), nonzero);
}

TEST(Graph, HousingHeadKeepsThreeEdges) {
  const BlockParams b = housing_block();
  NetworkSpec spec;
  spec.x_dim = 2;
  spec.mode = OutputMode::kClassVector;
  spec.n_classes = 2;
  spec.layers = {LayerArch{1, {1, 2, {}}, {0, 1, {}}, {0, 1, {}}}};
  Network net(spec);
  ASSERT_EQ(net.block_shape(0).param_count(), b.values.size());
  std::copy(b.values.begin(), b.values.end(), net.block_params(0, 0).begin());
  GraphOptions opt;
  opt.x_names = kHousingNames;
  const auto dot = export_graph(net, opt);
  std::size_t oracle = 0;
  for (std::size_t j = 0; j < b.values.size(); ++j) {
    if (j >= b.shape.coeff_offset(Head::kU) && j < b.shape.bias_offset(Head::kU)) oracle += std::abs(b.values[j]) >= 0.3;
  }
  EXPECT_EQ(count_edges(dot, "L1B1U1"), oracle);
  EXPECT_EQ(oracle, 3u);
  EXPECT_NE(dot.find("label=\"-0.56\""), std::string::npos);
}

}  // namespace
}  // namespace bl
