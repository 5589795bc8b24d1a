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

#include "bl/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "bl/error.hpp"

namespace bl {

namespace {

const char* const kHeadLetter[3] = {"U", "C", "T"};
const char* const kResidual[3] = {"R̃_u", "R̃_c", "R̃_t"};

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::size_t basis_size(const HeadShape& h) { return h.basis ? h.basis->size() : 0; }

}  // namespace

std::string block_name(std::size_t layer, std::size_t block) {
  return "L" + std::to_string(layer + 1) + "B" + std::to_string(block + 1);
}

std::vector<std::string> network_input_names(const Network& net,
                                             std::span<const std::string> x_names,
                                             std::span<const std::string> y_names) {
  const auto& spec = net.spec();
  std::vector<std::string> out;
  if (!x_names.empty() && x_names.size() != spec.x_dim) {
    throw ShapeError("expected " + std::to_string(spec.x_dim) + " feature names, got " +
                     std::to_string(x_names.size()));
  }
  for (std::size_t k = 0; k < spec.x_dim; ++k) {
    out.push_back(x_names.empty() ? "x" + std::to_string(k + 1) : x_names[k]);
  }
  if (spec.mode == OutputMode::kClassVector) return out;
  const std::size_t ny = spec.response_dim();
  if (!y_names.empty() && y_names.size() != ny) {
    throw ShapeError("expected " + std::to_string(ny) + " response names, got " +
                     std::to_string(y_names.size()));
  }
  for (std::size_t k = 0; k < ny; ++k) {
    if (!y_names.empty()) {
      out.push_back(y_names[k]);
    } else if (k < spec.n_classes) {
      out.push_back("e" + std::to_string(k + 1));
    } else {
      out.push_back("y" + std::to_string(k - spec.n_classes + 1));
    }
  }
  return out;
}

std::vector<std::string> layer_input_names(const Network& net, std::size_t layer,
                                           std::span<const std::string> base_names) {
  std::vector<std::string> out;
  if (layer == 0 || net.skip() == SkipMode::kDense) out.assign(base_names.begin(), base_names.end());
  const std::size_t first = layer == 0 ? layer : (net.skip() == SkipMode::kDense ? 0 : layer - 1);
  for (std::size_t j = first; j < layer; ++j) {
    for (std::size_t b = 0; b < net.width(j); ++b) out.push_back(block_name(j, b));
  }
  return out;
}

std::string monomial_label(const Exponent& e, std::span<const std::string> names) {
  std::string s;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    if (!s.empty()) s += "·";
    s += names[k];
    if (e[k] > 1) s += "^" + std::to_string(e[k]);
  }
  return s.empty() ? "1" : s;
}

std::size_t candidate_count(const BlockShape& shape) {
  std::size_t n = 0;
  for (int h = 0; h < 3; ++h) {
    const auto& hs = shape.head(static_cast<Head>(h));
    if (hs.rows > 0) n = std::max(n, basis_size(hs) + (shape.with_bias() ? 1 : 0));
  }
  return n;
}

SymbolicUMP extract_ump(const BlockShape& shape, std::span<const double> params,
                        std::span<const std::string> names, std::size_t k) {
  if (names.size() != shape.input_dim()) {
    throw ShapeError("expected " + std::to_string(shape.input_dim()) + " feature names, got " +
                     std::to_string(names.size()));
  }
  if (params.size() != shape.param_count()) throw ShapeError("block parameter length mismatch");
  if (k < 1 || k > candidate_count(shape)) {
    throw ConfigError("top-k must lie in [1, " + std::to_string(candidate_count(shape)) + "]");
  }
  SymbolicUMP out;
  out.style = shape.style();
  out.k = k;
  out.feature_names.assign(names.begin(), names.end());
  std::vector<RowSummary>* dest[3] = {&out.objective, &out.inequality, &out.equality};
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    const auto& hs = shape.head(head);
    const std::size_t rows = hs.rows;
    out.lambdas[h].assign(params.begin() + static_cast<std::ptrdiff_t>(shape.lambda_offset(head)),
                          params.begin() + static_cast<std::ptrdiff_t>(shape.lambda_offset(head) + rows));
    const std::size_t n = basis_size(hs);
    const Exponent constant(shape.input_dim(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      // candidate list: bias first, then basis order; ties go to the earlier one
      std::vector<std::pair<Exponent, double>> cand;
      if (shape.with_bias()) cand.emplace_back(constant, params[shape.bias_offset(head) + r]);
      for (std::size_t j = 0; j < n; ++j) {
        cand.emplace_back(hs.basis->exponents()[j], params[shape.coeff_offset(head) + r * n + j]);
      }
      std::vector<std::size_t> order(cand.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(cand[a].second) > std::abs(cand[b].second);
      });
      RowSummary row;
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& [e, c] = cand[order[i]];
        if (i < k && c != 0.0) {
          row.terms.push_back(Term{e, c, monomial_label(e, names)});
        } else {
          row.residual += std::abs(c);
        }
      }
      out.residual_norm[h] += row.residual;
      dest[h]->push_back(std::move(row));
    }
  }
  return out;
}

double eval_row(const RowSummary& row, std::span<const double> z) {
  double acc = 0.0;
  for (const Term& t : row.terms) {
    double m = t.coeff;
    for (std::size_t k = 0; k < t.exponent.size(); ++k) {
      for (int p = 0; p < t.exponent[k]; ++p) m *= z[k];
    }
    acc += m;
  }
  return acc;
}

namespace {

std::string render_terms(const RowSummary& row) {
  std::string s;
  for (const Term& t : row.terms) {
    const bool constant = t.label == "1";
    const std::string mag = fixed2(std::abs(t.coeff)) + (constant ? "" : "·" + t.label);
    if (s.empty()) {
      s = (t.coeff < 0 ? "-" : "") + mag;
    } else {
      s += (t.coeff < 0 ? " - " : " + ") + mag;
    }
  }
  return s.empty() ? "0" : s;
}

std::string row_name(const char* letter, std::size_t r, std::size_t rows) {
  return std::string(letter) + (rows > 1 ? std::to_string(r + 1) : "") + "(x,y)";
}

std::string render_lambdas(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fixed2(v[i]);
  return s + ")";
}

}  // namespace

std::string render_ump(const SymbolicUMP& ump) {
  std::ostringstream os;
  const std::vector<RowSummary>* rows[3] = {&ump.objective, &ump.inequality, &ump.equality};
  for (std::size_t r = 0; r < ump.objective.size(); ++r) {
    os << "max  " << row_name("U", r, ump.objective.size()) << " = " << render_terms(ump.objective[r])
       << " + " << kResidual[0] << "\n";
  }
  if (ump.objective.empty()) os << "max  0\n";
  bool first = true;
  for (std::size_t r = 0; r < ump.inequality.size(); ++r) {
    os << (first ? "s.t.  " : "      ") << render_terms(ump.inequality[r]) << " + " << kResidual[1]
       << " ≤ 0\n";
    first = false;
  }
  for (std::size_t r = 0; r < ump.equality.size(); ++r) {
    os << (first ? "s.t.  " : "      ") << render_terms(ump.equality[r]) << " + " << kResidual[2]
       << " = 0\n";
    first = false;
  }
  os << "with  ";
  for (int h = 0; h < 3; ++h) {
    if (rows[h]->empty()) continue;
    os << "λ_" << static_cast<char>(std::tolower(kHeadLetter[h][0])) << " = "
       << render_lambdas(ump.lambdas[h]) << "  ";
  }
  os << "|R̃| = (" << fixed2(ump.residual_norm[0]) << ", " << fixed2(ump.residual_norm[1])
     << ", " << fixed2(ump.residual_norm[2]) << ")\n";
  return os.str();
}

std::string to_string(QuotientMode m) { return m == QuotientMode::kScale ? "scale" : "symmetry"; }

QuotientMode quotient_mode_from_string(const std::string& s) {
  if (s == "symmetry") return QuotientMode::kSymmetry;
  if (s == "scale") return QuotientMode::kScale;
  throw ConfigError("unknown quotient mode '" + s + "' (expected symmetry or scale)");
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

// View of one atom (a head row) inside a block's flat parameters.
struct AtomRef {
  std::size_t lambda;
  std::size_t coeff;
  std::size_t bias;  // npos when the block has no biases
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

AtomRef atom(const BlockShape& sh, Head h, std::size_t r) {
  const std::size_t n = basis_size(sh.head(h));
  return AtomRef{sh.lambda_offset(h) + r, sh.coeff_offset(h) + r * n,
                 sh.with_bias() ? sh.bias_offset(h) + r : kNone};
}

std::vector<double> atom_key(std::span<const double> p, const BlockShape& sh, Head h,
                             std::size_t r) {
  const AtomRef a = atom(sh, h, r);
  const std::size_t n = basis_size(sh.head(h));
  std::vector<double> key{p[a.lambda]};
  key.insert(key.end(), p.begin() + static_cast<std::ptrdiff_t>(a.coeff),
             p.begin() + static_cast<std::ptrdiff_t>(a.coeff + n));
  if (a.bias != kNone) key.push_back(p[a.bias]);
  return key;
}

void write_atom(std::span<double> p, const BlockShape& sh, Head h, std::size_t r,
                const std::vector<double>& key) {
  const AtomRef a = atom(sh, h, r);
  const std::size_t n = basis_size(sh.head(h));
  p[a.lambda] = key[0];
  std::copy(key.begin() + 1, key.begin() + 1 + static_cast<std::ptrdiff_t>(n),
            p.begin() + static_cast<std::ptrdiff_t>(a.coeff));
  if (a.bias != kNone) p[a.bias] = key[1 + n];
}

// Rewrites every coefficient row so that input coordinate k moves to new_pos[k].
void remap_inputs(std::span<double> p, const BlockShape& sh, const std::vector<std::size_t>& new_pos) {
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    const auto& hs = sh.head(head);
    if (hs.rows == 0) continue;
    const auto& ex = hs.basis->exponents();
    const std::size_t n = ex.size();
    std::vector<std::size_t> target(n);
    for (std::size_t j = 0; j < n; ++j) {
      Exponent moved(ex[j].size(), 0);
      for (std::size_t k = 0; k < ex[j].size(); ++k) moved[new_pos[k]] = ex[j][k];
      const auto idx = hs.basis->index_of(moved);
      if (!idx) throw UnsupportedError("canonical block ordering needs permutation-closed bases");
      target[j] = *idx;
    }
    for (std::size_t r = 0; r < hs.rows; ++r) {
      const std::size_t off = sh.coeff_offset(head) + r * n;
      std::vector<double> row(p.begin() + static_cast<std::ptrdiff_t>(off),
                              p.begin() + static_cast<std::ptrdiff_t>(off + n));
      for (std::size_t j = 0; j < n; ++j) p[off + target[j]] = row[j];
    }
  }
}

void normalize_block(std::span<double> p, const BlockShape& sh, const std::string& name,
                     std::vector<std::string>& warnings) {
  // T-row sign: first nonzero coefficient (then bias) positive
  const Head t = Head::kT;
  const std::size_t nt = basis_size(sh.head(t));
  for (std::size_t r = 0; r < sh.rows(t); ++r) {
    const AtomRef a = atom(sh, t, r);
    double lead = 0.0;
    for (std::size_t j = 0; j < nt && lead == 0.0; ++j) lead = p[a.coeff + j];
    if (lead == 0.0 && a.bias != kNone) lead = p[a.bias];
    if (lead < 0.0) {
      for (std::size_t j = 0; j < nt; ++j) p[a.coeff + j] = -p[a.coeff + j];
      if (a.bias != kNone) p[a.bias] = -p[a.bias];
    }
  }
  for (int h = 0; h < 3; ++h) {
    const Head head = static_cast<Head>(h);
    const std::size_t rows = sh.rows(head);
    std::vector<std::vector<double>> keys;
    for (std::size_t r = 0; r < rows; ++r) {
      auto key = atom_key(p, sh, head, r);
      if (std::abs(key[0]) < kDeadAtomThreshold) std::fill(key.begin(), key.end(), 0.0);
      keys.push_back(std::move(key));
    }
    std::stable_sort(keys.begin(), keys.end());
    for (std::size_t r = 0; r < rows; ++r) write_atom(p, sh, head, r, keys[r]);
    for (std::size_t a = 0; a < rows; ++a) {
      if (keys[a][0] == 0.0) continue;
      for (std::size_t b = a + 1; b < rows; ++b) {
        if (keys[b][0] == 0.0) continue;
        bool same = true;
        for (std::size_t i = 1; i < keys[a].size() && same; ++i) {
          same = std::abs(keys[a][i] - keys[b][i]) <= kDuplicateAtomTolerance;
        }
        if (same) {
          warnings.push_back(name + " " + kHeadLetter[h] + " rows " + std::to_string(a + 1) +
                             " and " + std::to_string(b + 1) + " are duplicate atoms");
        }
      }
    }
  }
}

}  // namespace

CanonicalForm canonicalize(const Network& net, QuotientMode mode) {
  CanonicalForm out{net, mode, 1.0, {}};
  Network& cn = out.net;
  auto params = cn.params();
  const std::size_t L = cn.depth();
  std::vector<std::vector<std::size_t>> perm(L);  // new position a holds old block perm[l][a]

  for (std::size_t l = 0; l < L; ++l) {
    const BlockShape& sh = cn.block_shape(l);
    const std::size_t w = cn.width(l);
    const std::size_t bp = sh.param_count();

    // input permutation induced by earlier layers
    if (l > 0) {
      std::vector<std::size_t> new_pos(cn.layer_input_dim(l));
      std::iota(new_pos.begin(), new_pos.end(), 0);
      std::size_t off = cn.skip() == SkipMode::kDense ? cn.input_dim() : 0;
      const std::size_t first = cn.skip() == SkipMode::kDense ? 0 : l - 1;
      for (std::size_t j = first; j < l; ++j) {
        for (std::size_t a = 0; a < cn.width(j); ++a) new_pos[off + perm[j][a]] = off + a;
        off += cn.width(j);
      }
      bool moved = false;
      for (std::size_t k = 0; k < new_pos.size(); ++k) moved = moved || new_pos[k] != k;
      if (moved) {
        for (std::size_t b = 0; b < w; ++b) remap_inputs(cn.block_params(l, b), sh, new_pos);
      }
      if (cn.has_projection(l)) {
        const std::size_t po = cn.projection_offset(l);
        const std::size_t wp = cn.width(l - 1);
        std::vector<double> old(params.begin() + static_cast<std::ptrdiff_t>(po),
                                params.begin() + static_cast<std::ptrdiff_t>(po + w * wp));
        for (std::size_t a = 0; a < w; ++a) {
          for (std::size_t c = 0; c < wp; ++c) params[po + a * wp + c] = old[a * wp + perm[l - 1][c]];
        }
      }
    }
    for (std::size_t b = 0; b < w; ++b) normalize_block(cn.block_params(l, b), sh, block_name(l, b), out.warnings);

    // block order
    const bool forced = cn.skip() == SkipMode::kResidual && l > 0 && !cn.has_projection(l);
    std::vector<std::size_t> order(w);
    std::iota(order.begin(), order.end(), 0);
    if (forced) {
      order = perm[l - 1];
    } else {
      const std::size_t wl = w;
      const auto key = [&](std::size_t b) {
        auto bpv = cn.block_params(l, b);
        std::vector<double> k(bpv.begin(), bpv.end());
        if (l == L - 1) {
          for (std::size_t o = 0; o < cn.output_dim(); ++o) k.push_back(cn.readout_weight()[o * wl + b]);
        }
        return k;
      };
      std::vector<std::vector<double>> keys(w);
      for (std::size_t b = 0; b < w; ++b) keys[b] = key(b);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    }
    perm[l] = order;
    std::vector<double> old(params.begin() + static_cast<std::ptrdiff_t>(cn.block_offset(l, 0)),
                            params.begin() + static_cast<std::ptrdiff_t>(cn.block_offset(l, 0) + w * bp));
    for (std::size_t a = 0; a < w; ++a) {
      std::copy(old.begin() + static_cast<std::ptrdiff_t>(order[a] * bp),
                old.begin() + static_cast<std::ptrdiff_t>((order[a] + 1) * bp),
                cn.block_params(l, a).begin());
    }
    if (cn.has_projection(l)) {
      const std::size_t po = cn.projection_offset(l);
      const std::size_t wp = cn.width(l - 1);
      std::vector<double> prj(params.begin() + static_cast<std::ptrdiff_t>(po),
                              params.begin() + static_cast<std::ptrdiff_t>(po + w * wp));
      for (std::size_t a = 0; a < w; ++a) {
        std::copy(prj.begin() + static_cast<std::ptrdiff_t>(order[a] * wp),
                  prj.begin() + static_cast<std::ptrdiff_t>((order[a] + 1) * wp),
                  params.begin() + static_cast<std::ptrdiff_t>(po + a * wp));
      }
    }
  }
  // readout columns
  const std::size_t wl = cn.width(L - 1);
  auto W = cn.readout_weight();
  const std::vector<double> oldW(W.begin(), W.end());
  for (std::size_t o = 0; o < cn.output_dim(); ++o) {
    for (std::size_t a = 0; a < wl; ++a) W[o * wl + a] = oldW[o * wl + perm[L - 1][a]];
  }

  bool alive = false;
  for (const auto& [b, e] : cn.lambda_ranges()) {
    for (std::size_t i = b; i < e; ++i) alive = alive || params[i] != 0.0;
  }
  if (!alive) throw DegenerateModelError("every atom was pruned; the model is degenerate");

  if (mode == QuotientMode::kScale) {
    double c = 0.0;
    for (double v : W) c = std::max(c, std::abs(v));
    if (c == 0.0) throw DegenerateModelError("readout is identically zero");
    for (double& v : W) v /= c;
    for (double& v : cn.readout_bias()) v /= c;
    out.scale = c;
  }
  return out;
}

namespace {

bool same_architecture(const Network& a, const Network& b) {
  const auto& sa = a.spec();
  const auto& sb = b.spec();
  if (sa.x_dim != sb.x_dim || sa.y_dim != sb.y_dim || sa.n_classes != sb.n_classes ||
      sa.mode != sb.mode || sa.style != sb.style || sa.skip != sb.skip ||
      sa.identity_utility != sb.identity_utility || a.has_readout_bias() != b.has_readout_bias() ||
      a.param_count() != b.param_count() || a.depth() != b.depth()) {
    return false;
  }
  for (std::size_t l = 0; l < a.depth(); ++l) {
    if (a.width(l) != b.width(l)) return false;
    for (int h = 0; h < 3; ++h) {
      const auto& ha = a.block_shape(l).head(static_cast<Head>(h));
      const auto& hb = b.block_shape(l).head(static_cast<Head>(h));
      if (ha.rows != hb.rows) return false;
      if (ha.rows > 0 && !(*ha.basis == *hb.basis)) return false;
    }
  }
  return true;
}

}  // namespace

bool equivalent(const Network& a, const Network& b, QuotientMode mode, double tol) {
  if (!same_architecture(a, b)) return false;
  const CanonicalForm ca = canonicalize(a, mode);
  const CanonicalForm cb = canonicalize(b, mode);
  const auto pa = ca.params();
  const auto pb = cb.params();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!(std::abs(pa[i] - pb[i]) <= tol)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// DOT export

namespace {

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string export_graph(const Network& net, const GraphOptions& opt) {
  if (!(opt.threshold >= 0.0)) throw ConfigError("graph threshold must be >= 0");
  const auto base = network_input_names(net, opt.x_names, opt.y_names);
  const auto p = net.params();
  const double th = opt.threshold;
  std::ostringstream nodes;
  std::ostringstream edges;
  const auto edge = [&](const std::string& from, const std::string& to, double w,
                        const char* extra = "") {
    if (std::abs(w) >= th && w != 0.0) {
      edges << "  " << from << " -> " << to << " [label=" << quote(fixed2(w)) << extra << "];\n";
    }
  };
  std::vector<std::string> input_ids;
  for (std::size_t k = 0; k < base.size(); ++k) {
    input_ids.push_back("in" + std::to_string(k + 1));
    nodes << "  " << input_ids.back() << " [label=" << quote(base[k]) << ", shape=ellipse];\n";
  }
  const char* centre[3] = {"tanh⁻¹(U", "C", "T"};
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const BlockShape& sh = net.block_shape(l);
    const auto names = layer_input_names(net, l, base);
    // node ids of this layer's input coordinates
    std::vector<std::string> src;
    if (l == 0 || net.skip() == SkipMode::kDense) src = input_ids;
    const std::size_t first = l == 0 ? l : (net.skip() == SkipMode::kDense ? 0 : l - 1);
    for (std::size_t j = first; j < l; ++j) {
      for (std::size_t b = 0; b < net.width(j); ++b) src.push_back(block_name(j, b));
    }
    std::vector<bool> monomial_declared[3];
    for (std::size_t b = 0; b < net.width(l); ++b) {
      const std::string bn = block_name(l, b);
      nodes << "  " << bn << " [label=" << quote(bn) << ", shape=box3d];\n";
      const auto bp = net.block_params(l, b);
      for (int h = 0; h < 3; ++h) {
        const Head head = static_cast<Head>(h);
        const auto& hs = sh.head(head);
        const std::size_t n = basis_size(hs);
        monomial_declared[h].resize(n, false);
        for (std::size_t r = 0; r < hs.rows; ++r) {
          const std::string hn = bn + kHeadLetter[h] + std::to_string(r + 1);
          std::string label = std::string(centre[h]) + std::to_string(r + 1) + (h == 0 ? ")" : "");
          if (sh.with_bias()) label += "\\nbias " + fixed2(bp[sh.bias_offset(head) + r]);
          nodes << "  " << hn << " [label=" << quote(label) << "];\n";
          for (std::size_t j = 0; j < n; ++j) {
            const double c = bp[sh.coeff_offset(head) + r * n + j];
            const Exponent& e = hs.basis->exponents()[j];
            int total = 0;
            std::size_t var = 0;
            for (std::size_t k = 0; k < e.size(); ++k) {
              total += e[k];
              if (e[k] > 0) var = k;
            }
            std::string from;
            if (total == 1) {
              from = src[var];
            } else {
              from = "L" + std::to_string(l + 1) + kHeadLetter[h] + "M" + std::to_string(j + 1);
              if (!monomial_declared[h][j] && std::abs(c) >= th && c != 0.0) {
                nodes << "  " << from << " [label=" << quote(monomial_label(e, names))
                      << ", shape=plaintext];\n";
                monomial_declared[h][j] = true;
              }
            }
            edge(from, hn, c);
          }
          edge(hn, bn, bp[sh.lambda_offset(head) + r], ", style=bold");
        }
      }
      if (net.skip() == SkipMode::kResidual && l > 0) {
        if (net.has_projection(l)) {
          const std::size_t wp = net.width(l - 1);
          for (std::size_t c = 0; c < wp; ++c) {
            edge(block_name(l - 1, c), bn, p[net.projection_offset(l) + b * wp + c], ", style=dashed");
          }
        } else {
          edge(block_name(l - 1, b), bn, 1.0, ", style=dashed");
        }
      }
    }
  }
  const std::size_t L = net.depth();
  const std::size_t wl = net.width(L - 1);
  const auto W = net.readout_weight();
  for (std::size_t o = 0; o < net.output_dim(); ++o) {
    const std::string on = net.output_dim() == 1 ? "readout" : "readout" + std::to_string(o + 1);
    nodes << "  " << on << " [label=" << quote(net.output_dim() == 1 ? "BL(x,y)" : "u" + std::to_string(o + 1))
          << ", shape=doublecircle];\n";
    for (std::size_t b = 0; b < wl; ++b) edge(block_name(L - 1, b), on, W[o * wl + b]);
  }
  std::ostringstream os;
  os << "digraph BL {\n  rankdir=LR;\n  node [shape=box];\n" << nodes.str() << edges.str() << "}\n";
  return os.str();
}

}  // namespace bl
