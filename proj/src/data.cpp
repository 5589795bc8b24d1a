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

#include "bl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "bl/error.hpp"
#include "bl/parallel.hpp"
#include "bl/rng.hpp"

namespace bl {

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ParseError("stray quote inside an unquoted field on line " + std::to_string(line));
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field at end of input");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return parse_csv(in);
}

std::string to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::kContinuous:
      return "continuous";
    case ColumnKind::kOrdinal:
      return "ordinal";
    case ColumnKind::kNominal:
      return "nominal";
  }
  return "continuous";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "continuous") return ColumnKind::kContinuous;
  if (s == "ordinal") return ColumnKind::kOrdinal;
  if (s == "nominal") return ColumnKind::kNominal;
  throw ConfigError("unknown column kind '" + s + "' (expected continuous, ordinal or nominal)");
}

void Schema::validate() const {
  if (features.empty()) throw ConfigError("data.schema needs at least one feature column");
  if (label.empty() && continuous_targets.empty()) {
    throw ConfigError("data.schema needs a label column or continuous targets");
  }
  std::vector<std::string> seen;
  const auto claim = [&](const std::string& n) {
    if (std::find(seen.begin(), seen.end(), n) != seen.end()) {
      throw ConfigError("data.schema names column '" + n + "' twice");
    }
    seen.push_back(n);
  };
  for (const auto& f : features) claim(f.name);
  if (!label.empty()) claim(label);
  for (const auto& t : continuous_targets) claim(t);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError("cannot parse '" + cell + "' as a number at row " + std::to_string(row) +
                     ", column '" + col + "'");
  }
  return v;
}

}  // namespace

RawDataset load_table(const std::vector<std::vector<std::string>>& cells, const Schema& schema) {
  schema.validate();
  if (cells.empty()) throw ParseError("data file has no header row");
  const auto& header = cells[0];
  const auto column = [&](const std::string& name) {
    const auto it = std::find_if(header.begin(), header.end(),
                                 [&](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) throw ParseError("column '" + name + "' not found in the header");
    return static_cast<std::size_t>(it - header.begin());
  };
  RawDataset raw;
  raw.rows = cells.size() - 1;
  if (raw.rows == 0) throw ParseError("data file has no rows");
  for (std::size_t r = 1; r < cells.size(); ++r) {
    if (cells[r].size() != header.size()) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(cells[r].size()) +
                       " cells, header has " + std::to_string(header.size()));
    }
  }
  const auto cell = [&](std::size_t r, std::size_t c, const std::string& name) -> const std::string& {
    const std::string& v = cells[r][c];
    if (trim(v).empty()) {
      throw ParseError("missing value at row " + std::to_string(r) + ", column '" + name + "'");
    }
    return v;
  };
  for (const auto& spec : schema.features) {
    RawColumn col;
    col.spec = spec;
    const std::size_t c = column(spec.name);
    for (std::size_t r = 1; r < cells.size(); ++r) {
      const std::string& v = cell(r, c, spec.name);
      if (spec.kind == ColumnKind::kNominal) {
        const std::string t = trim(v);
        if (std::find(col.categories.begin(), col.categories.end(), t) == col.categories.end()) {
          col.categories.push_back(t);
        }
        col.text.push_back(t);
      } else if (spec.kind == ColumnKind::kOrdinal && !spec.levels.empty()) {
        const auto it = std::find(spec.levels.begin(), spec.levels.end(), trim(v));
        if (it == spec.levels.end()) {
          throw ParseError("unknown level '" + v + "' at row " + std::to_string(r) + ", column '" +
                           spec.name + "'");
        }
        col.numbers.push_back(static_cast<double>(it - spec.levels.begin()));
      } else {
        col.numbers.push_back(parse_number(v, r, spec.name));
      }
    }
    raw.features.push_back(std::move(col));
  }
  if (!schema.label.empty()) {
    const std::size_t c = column(schema.label);
    raw.class_names = schema.classes;
    const bool fixed = !schema.classes.empty();
    for (std::size_t r = 1; r < cells.size(); ++r) {
      const std::string t = trim(cell(r, c, schema.label));
      auto it = std::find(raw.class_names.begin(), raw.class_names.end(), t);
      if (it == raw.class_names.end()) {
        if (fixed) {
          throw ParseError("label '" + t + "' at row " + std::to_string(r) + " is not a declared class");
        }
        raw.class_names.push_back(t);
        it = raw.class_names.end() - 1;
      }
      raw.labels.push_back(static_cast<int>(it - raw.class_names.begin()));
    }
    if (raw.class_names.size() < 2) throw ParseError("label column '" + schema.label + "' has fewer than 2 classes");
  }
  for (const auto& name : schema.continuous_targets) {
    const std::size_t c = column(name);
    std::vector<double> v;
    for (std::size_t r = 1; r < cells.size(); ++r) v.push_back(parse_number(cell(r, c, name), r, name));
    raw.targets.push_back(std::move(v));
  }
  return raw;
}

RawDataset load_csv(const std::string& path, const Schema& schema) {
  return load_table(read_csv_file(path), schema);
}

std::vector<std::string> Preprocessor::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::kNominal) {
      for (const auto& cat : c.categories) out.push_back(c.name + "=" + cat);
    } else {
      out.push_back(c.name);
    }
  }
  return out;
}

std::size_t Preprocessor::encoded_width() const { return feature_names().size(); }

namespace {

// Population mean and standard deviation (floored) of v over idx.
std::pair<double, double> moments(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> a(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) a[i] = v[idx[i]];
  const double mean = pairwise_sum(a) / static_cast<double>(a.size());
  for (double& x : a) x = (x - mean) * (x - mean);
  const double sd = std::sqrt(pairwise_sum(a) / static_cast<double>(a.size()));
  return {mean, std::max(sd, kStdFloor)};
}

}  // namespace

Preprocessor fit_preprocessor(const RawDataset& raw, std::span<const std::size_t> train_rows) {
  if (train_rows.empty()) throw ShapeError("cannot fit encoders on an empty training split");
  Preprocessor p;
  for (const auto& col : raw.features) {
    ColumnEncoder e;
    e.name = col.spec.name;
    e.kind = col.spec.kind;
    e.levels = col.spec.levels;
    if (col.spec.kind == ColumnKind::kNominal) {
      for (const auto& cat : col.categories) {
        const bool in_train = std::any_of(train_rows.begin(), train_rows.end(),
                                          [&](std::size_t r) { return col.text[r] == cat; });
        if (in_train) e.categories.push_back(cat);
      }
    } else {
      std::tie(e.mean, e.std) = moments(col.numbers, train_rows);
    }
    p.columns.push_back(std::move(e));
  }
  p.class_names = raw.class_names;
  for (const auto& t : raw.targets) {
    const auto [m, s] = moments(t, train_rows);
    p.target_mean.push_back(m);
    p.target_std.push_back(s);
  }
  return p;
}

Matrix Preprocessor::encode(const RawDataset& raw, std::span<const std::size_t> idx,
                            std::vector<std::string>* warnings) const {
  if (raw.features.size() != columns.size()) throw ShapeError("raw table does not match the encoder columns");
  Matrix out(idx.size(), encoded_width());
  std::size_t off = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& e = columns[c];
    const auto& col = raw.features[c];
    if (col.spec.name != e.name || col.spec.kind != e.kind) {
      throw ShapeError("column '" + col.spec.name + "' does not match encoder '" + e.name + "'");
    }
    if (e.kind == ColumnKind::kNominal) {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto it = std::find(e.categories.begin(), e.categories.end(), col.text[idx[i]]);
        if (it == e.categories.end()) {
          if (warnings) {
            warnings->push_back("category '" + col.text[idx[i]] + "' of column '" + e.name +
                                "' was not seen in training; encoded as all zeros");
          }
          continue;
        }
        out(i, off + static_cast<std::size_t>(it - e.categories.begin())) = 1.0;
      }
      off += e.categories.size();
    } else {
      for (std::size_t i = 0; i < idx.size(); ++i) out(i, off) = (col.numbers[idx[i]] - e.mean) / e.std;
      ++off;
    }
  }
  return out;
}

Matrix Preprocessor::encode_targets(const RawDataset& raw, std::span<const std::size_t> idx) const {
  if (raw.targets.size() != target_mean.size()) throw ShapeError("continuous target count mismatch");
  Matrix out(idx.size(), target_mean.size());
  for (std::size_t k = 0; k < target_mean.size(); ++k) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out(i, k) = (raw.targets[k][idx[i]] - target_mean[k]) / target_std[k];
    }
  }
  return out;
}

Split make_split(std::size_t n, const SplitRatios& r, std::uint64_t seed) {
  if (!(r.train > 0 && r.val > 0 && r.test > 0) || std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw ConfigError("data.ratios must be positive and sum to 1");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(stream_key(seed, {0x5b11}));
  std::shuffle(order.begin(), order.end(), rng);
  const auto count = [&](double f) { return static_cast<std::size_t>(std::llround(f * static_cast<double>(n))); };
  const std::size_t nt = std::min(n, count(r.train));
  const std::size_t nv = std::min(n - nt, count(r.val));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nt));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(nt), order.begin() + static_cast<std::ptrdiff_t>(nt + nv));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(nt + nv), order.end());
  return s;
}

EncodedSplit encode_rows(const RawDataset& raw, const Preprocessor& prep,
                         std::span<const std::size_t> rows, std::vector<std::string>* warnings) {
  EncodedSplit e;
  e.rows.assign(rows.begin(), rows.end());
  e.x = prep.encode(raw, rows, warnings);
  if (!raw.labels.empty()) {
    for (std::size_t r : rows) e.labels.push_back(raw.labels[r]);
  }
  e.y = prep.encode_targets(raw, rows);
  return e;
}

Dataset preprocess_and_split(const RawDataset& raw, const SplitRatios& ratios, std::uint64_t seed) {
  Dataset d;
  d.split = make_split(raw.rows, ratios, seed);
  if (d.split.train.empty()) throw ConfigError("training split is empty");
  d.prep = fit_preprocessor(raw, d.split.train);
  d.train = encode_rows(raw, d.prep, d.split.train, &d.warnings);
  d.val = encode_rows(raw, d.prep, d.split.val, &d.warnings);
  d.test = encode_rows(raw, d.prep, d.split.test, &d.warnings);
  return d;
}

// ---------------------------------------------------------------------------
// Metrics

double binary_auc(std::span<const int> labels, std::span<const double> scores) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == 1) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

Metrics compute_metrics(std::span<const int> labels, const Matrix& probs) {
  const std::size_t n = labels.size();
  const std::size_t m = probs.cols;
  if (probs.rows != n) throw ShapeError("probability matrix has " + std::to_string(probs.rows) +
                                        " rows for " + std::to_string(n) + " labels");
  if (n == 0 || m < 2) throw ShapeError("metrics need at least one row and two classes");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= m) throw ShapeError("label out of range");
    double s = 0.0;
    for (double p : probs.row(i)) s += p;
    if (std::abs(s - 1.0) > 1e-9) throw NumericError("probability row " + std::to_string(i) + " does not sum to 1");
  }
  Metrics out;
  std::vector<double> tp(m, 0.0), fp(m, 0.0), fn(m, 0.0);
  std::vector<double> nll(n);
  std::array<double, kEceBins> bin_n{}, bin_acc{}, bin_conf{};
  double hits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probs.row(i);
    const auto pred = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    const auto y = static_cast<std::size_t>(labels[i]);
    const double correct = pred == y ? 1.0 : 0.0;
    hits += correct;
    if (pred == y) {
      tp[y] += 1.0;
    } else {
      fp[pred] += 1.0;
      fn[y] += 1.0;
    }
    nll[i] = -std::log(std::max(row[y], kProbabilityFloor));
    const double conf = row[pred];
    const auto b = static_cast<std::size_t>(std::clamp(std::ceil(conf * kEceBins) - 1.0, 0.0,
                                                       static_cast<double>(kEceBins - 1)));
    bin_n[b] += 1.0;
    bin_acc[b] += correct;
    bin_conf[b] += conf;
  }
  const double dn = static_cast<double>(n);
  out.accuracy = hits / dn;
  double f1 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double den = 2.0 * tp[k] + fp[k] + fn[k];
    f1 += den > 0.0 ? 2.0 * tp[k] / den : 0.0;
  }
  out.f1_macro = f1 / static_cast<double>(m);
  out.nll = pairwise_sum(nll) / dn;
  for (std::size_t b = 0; b < kEceBins; ++b) {
    if (bin_n[b] > 0.0) out.ece += bin_n[b] / dn * std::abs(bin_acc[b] / bin_n[b] - bin_conf[b] / bin_n[b]);
  }
  if (m == 2) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = probs(i, 1);
    out.auc = binary_auc(labels, s);
  } else {
    double sum = 0.0;
    std::size_t used = 0;
    std::vector<int> ovr(n);
    std::vector<double> s(n);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        ovr[i] = static_cast<std::size_t>(labels[i]) == k ? 1 : 0;
        s[i] = probs(i, k);
      }
      const double a = binary_auc(ovr, s);
      if (!std::isnan(a)) {
        sum += a;
        ++used;
      }
    }
    out.auc = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string metrics_csv_header() { return "split,accuracy,f1_macro,auc,ece,nll"; }

std::string metrics_csv_row(const std::string& split, const Metrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << split << ',' << m.accuracy << ',' << m.f1_macro << ',' << m.auc << ',' << m.ece << ',' << m.nll;
  return os.str();
}

}  // namespace bl
