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

// Model files: UTF-8 JSON with explicit architecture, nested parameters in
// layer/block/head order, temperature, provenance and the stored
// preprocessing needed to encode new data.
#ifndef BL_MODEL_IO_HPP_
#define BL_MODEL_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "bl/data.hpp"
#include "bl/gibbs.hpp"

namespace bl {

inline constexpr int kModelFormatVersion = 1;

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string library_version;
};

struct StoredData {
  Schema schema;
  Preprocessor prep;
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
};

struct ModelFile {
  GibbsModel model;
  Provenance provenance;
  std::optional<StoredData> data;
};

std::string library_version();

std::string serialize_model(const ModelFile& file);
ModelFile parse_model(const std::string& text);
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

// Whole file as bytes; ConfigError when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace bl

#endif  // BL_MODEL_IO_HPP_
