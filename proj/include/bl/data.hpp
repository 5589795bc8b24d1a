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

#ifndef BL_DATA_HPP_
#define BL_DATA_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bl/matrix.hpp"

namespace bl {

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

enum class ColumnKind { kContinuous, kOrdinal, kNominal };
std::string to_string(ColumnKind k);
ColumnKind column_kind_from_string(const std::string& s);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  // Ordinal: level order (cells are matched against these, or parsed as
  // numbers when empty). Nominal: ignored.
  std::vector<std::string> levels;
};

struct Schema {
  std::vector<ColumnSpec> features;
  std::string label;                       // discrete target column, or empty
  std::vector<std::string> classes;        // optional fixed class order
  std::vector<std::string> continuous_targets;
  void validate() const;
};

// Typed table before encoding.
struct RawColumn {
  ColumnSpec spec;
  std::vector<double> numbers;            // continuous and ordinal
  std::vector<std::string> text;          // nominal
  std::vector<std::string> categories;    // nominal, first-appearance order
};

struct RawDataset {
  std::vector<RawColumn> features;
  std::vector<int> labels;                // empty without a label column
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> targets;  // one vector per target column
  std::size_t rows = 0;
};

RawDataset load_table(const std::vector<std::vector<std::string>>& cells, const Schema& schema);
RawDataset load_csv(const std::string& path, const Schema& schema);

inline constexpr double kStdFloor = 1e-8;

struct ColumnEncoder {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  double mean = 0.0;
  double std = 1.0;
  std::vector<std::string> levels;      // ordinal level names, if any
  std::vector<std::string> categories;  // nominal one-hot order
};

// Everything needed to encode new rows the way the training split was encoded.
struct Preprocessor {
  std::vector<ColumnEncoder> columns;
  std::vector<std::string> class_names;
  std::vector<std::string> target_names;
  std::vector<double> target_mean;
  std::vector<double> target_std;

  std::vector<std::string> feature_names() const;
  std::size_t encoded_width() const;
  // Encodes rows `idx` of raw into a matrix; unseen categories become zeros
  // and are reported through `warnings`.
  Matrix encode(const RawDataset& raw, std::span<const std::size_t> idx,
                std::vector<std::string>* warnings = nullptr) const;
  Matrix encode_targets(const RawDataset& raw, std::span<const std::size_t> idx) const;
};

Preprocessor fit_preprocessor(const RawDataset& raw, std::span<const std::size_t> train_rows);

struct SplitRatios {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

Split make_split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

struct EncodedSplit {
  Matrix x;
  std::vector<int> labels;
  Matrix y;
  std::vector<std::size_t> rows;  // original row indices
};

struct Dataset {
  Preprocessor prep;
  Split split;
  EncodedSplit train;
  EncodedSplit val;
  EncodedSplit test;
  std::vector<std::string> warnings;
};

Dataset preprocess_and_split(const RawDataset& raw, const SplitRatios& ratios, std::uint64_t seed);
EncodedSplit encode_rows(const RawDataset& raw, const Preprocessor& prep,
                         std::span<const std::size_t> rows, std::vector<std::string>* warnings);

struct Metrics {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double auc = 0.0;  // NaN when undefined (single-class labels)
  double ece = 0.0;
  double nll = 0.0;
};

inline constexpr std::size_t kEceBins = 15;
inline constexpr double kProbabilityFloor = 1e-12;

// Probabilities: one row per example, rows summing to 1.
Metrics compute_metrics(std::span<const int> labels, const Matrix& probs);
// Rank-statistic AUC with midranks; positives are label == 1.
double binary_auc(std::span<const int> labels, std::span<const double> scores);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& split, const Metrics& m);

}  // namespace bl

#endif  // BL_DATA_HPP_
