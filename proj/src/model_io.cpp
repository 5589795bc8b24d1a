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

#include "bl/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bl/error.hpp"

#ifndef BL_VERSION
#define BL_VERSION "0.0.0"
#endif

namespace bl {

using ojson = nlohmann::ordered_json;

std::string library_version() { return BL_VERSION; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

namespace {

const char* const kHeadKeys[3] = {"u", "c", "t"};

ojson head_arch_json(const HeadArch& h) {
  ojson j;
  j["rank"] = h.rank;
  j["degree"] = h.degree;
  ojson extra = ojson::array();
  for (const auto& e : h.extra) extra.push_back(e);
  j["extra"] = extra;
  return j;
}

ojson rows_json(std::span<const double> v, std::size_t rows, std::size_t cols) {
  ojson a = ojson::array();
  for (std::size_t r = 0; r < rows; ++r) {
    a.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                    v.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  }
  return a;
}

// Reads a JSON array of numbers of exactly n entries into out.
void read_vector(const ojson& j, std::size_t n, double* out, const std::string& what) {
  if (!j.is_array() || j.size() != n) {
    throw FormatError(what + ": expected an array of " + std::to_string(n) + " numbers");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_number()) throw FormatError(what + ": expected numbers");
    out[i] = j[i].get<double>();
  }
}

void read_rows(const ojson& j, std::size_t rows, std::size_t cols, double* out, const std::string& what) {
  if (!j.is_array() || j.size() != rows) {
    throw FormatError(what + ": expected " + std::to_string(rows) + " rows");
  }
  for (std::size_t r = 0; r < rows; ++r) read_vector(j[r], cols, out + r * cols, what);
}

ojson schema_json(const Schema& s) {
  ojson j;
  ojson f = ojson::array();
  for (const auto& c : s.features) {
    f.push_back(ojson{{"name", c.name}, {"kind", to_string(c.kind)}, {"levels", c.levels}});
  }
  j["features"] = f;
  j["label"] = s.label;
  j["classes"] = s.classes;
  j["continuous_targets"] = s.continuous_targets;
  return j;
}

Schema schema_from(const ojson& j) {
  Schema s;
  for (const auto& c : j.at("features")) {
    s.features.push_back(ColumnSpec{c.at("name").get<std::string>(),
                                    column_kind_from_string(c.at("kind").get<std::string>()),
                                    c.at("levels").get<std::vector<std::string>>()});
  }
  s.label = j.at("label").get<std::string>();
  s.classes = j.at("classes").get<std::vector<std::string>>();
  s.continuous_targets = j.at("continuous_targets").get<std::vector<std::string>>();
  return s;
}

ojson prep_json(const Preprocessor& p) {
  ojson j;
  ojson cols = ojson::array();
  for (const auto& c : p.columns) {
    cols.push_back(ojson{{"name", c.name}, {"kind", to_string(c.kind)}, {"mean", c.mean}, {"std", c.std},
                         {"levels", c.levels}, {"categories", c.categories}});
  }
  j["columns"] = cols;
  j["class_names"] = p.class_names;
  j["target_names"] = p.target_names;
  j["target_mean"] = p.target_mean;
  j["target_std"] = p.target_std;
  return j;
}

Preprocessor prep_from(const ojson& j) {
  Preprocessor p;
  for (const auto& c : j.at("columns")) {
    ColumnEncoder e;
    e.name = c.at("name").get<std::string>();
    e.kind = column_kind_from_string(c.at("kind").get<std::string>());
    e.mean = c.at("mean").get<double>();
    e.std = c.at("std").get<double>();
    e.levels = c.at("levels").get<std::vector<std::string>>();
    e.categories = c.at("categories").get<std::vector<std::string>>();
    p.columns.push_back(std::move(e));
  }
  p.class_names = j.at("class_names").get<std::vector<std::string>>();
  p.target_names = j.at("target_names").get<std::vector<std::string>>();
  p.target_mean = j.at("target_mean").get<std::vector<double>>();
  p.target_std = j.at("target_std").get<std::vector<double>>();
  return p;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  const Network& net = file.model.net;
  const NetworkSpec& spec = net.spec();
  ojson j;
  j["format_version"] = kModelFormatVersion;
  j["style"] = to_string(spec.style);
  ojson arch;
  arch["x_dim"] = spec.x_dim;
  arch["y_dim"] = spec.y_dim;
  arch["n_classes"] = spec.n_classes;
  arch["output_mode"] = to_string(spec.mode);
  arch["skip_mode"] = to_string(spec.skip);
  arch["identity_utility"] = spec.identity_utility;
  arch["readout_bias"] = net.has_readout_bias();
  arch["restrict_y"] = spec.restrict_y;
  ojson layers = ojson::array();
  for (const auto& la : spec.layers) {
    layers.push_back(ojson{{"width", la.width}, {"u", head_arch_json(la.u)}, {"c", head_arch_json(la.c)},
                           {"t", head_arch_json(la.t)}});
  }
  arch["layers"] = layers;
  j["architecture"] = arch;

  ojson params;
  ojson player = ojson::array();
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const BlockShape& sh = net.block_shape(l);
    ojson blocks = ojson::array();
    for (std::size_t b = 0; b < net.width(l); ++b) {
      const auto p = net.block_params(l, b);
      ojson bj;
      for (int h = 0; h < 3; ++h) {
        const Head head = static_cast<Head>(h);
        const std::size_t rows = sh.rows(head);
        const std::size_t n = rows ? sh.head(head).basis->size() : 0;
        ojson hj;
        hj["lambda"] = std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(sh.lambda_offset(head)),
                                           p.begin() + static_cast<std::ptrdiff_t>(sh.lambda_offset(head) + rows));
        hj["coeff"] = rows_json(p.subspan(sh.coeff_offset(head), rows * n), rows, n);
        if (sh.with_bias()) {
          hj["bias"] = std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(sh.bias_offset(head)),
                                           p.begin() + static_cast<std::ptrdiff_t>(sh.bias_offset(head) + rows));
        }
        bj[kHeadKeys[h]] = hj;
      }
      blocks.push_back(bj);
    }
    player.push_back(blocks);
  }
  params["layers"] = player;
  ojson proj = ojson::array();
  for (std::size_t l = 1; l < net.depth(); ++l) {
    if (!net.has_projection(l)) continue;
    proj.push_back(ojson{{"layer", l + 1},
                         {"weight", rows_json(net.params().subspan(net.projection_offset(l), net.width(l) * net.width(l - 1)),
                                              net.width(l), net.width(l - 1))}});
  }
  params["projections"] = proj;
  const std::size_t wl = net.width(net.depth() - 1);
  ojson readout;
  readout["weight"] = rows_json(net.readout_weight(), net.output_dim(), wl);
  if (net.has_readout_bias()) {
    const auto p = net.params();
    readout["bias"] = std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(net.readout_bias_offset()),
                                          p.begin() + static_cast<std::ptrdiff_t>(net.readout_bias_offset() + net.output_dim()));
  }
  params["readout"] = readout;
  j["parameters"] = params;
  j["tau"] = file.model.tau;
  if (file.data) {
    const StoredData& d = *file.data;
    j["data"] = ojson{{"schema", schema_json(d.schema)},
                      {"preprocessing", prep_json(d.prep)},
                      {"split", ojson{{"ratios", {d.ratios.train, d.ratios.val, d.ratios.test}}, {"seed", d.split_seed}}}};
  }
  j["provenance"] = ojson{{"seed", file.provenance.seed},
                          {"config_digest", file.provenance.config_digest},
                          {"library_version", file.provenance.library_version}};
  return j.dump(2) + "\n";
}

namespace {

HeadArch head_arch_from(const ojson& j) {
  HeadArch h;
  h.rank = j.at("rank").get<std::size_t>();
  h.degree = j.at("degree").get<int>();
  for (const auto& e : j.at("extra")) h.extra.push_back(e.get<Exponent>());
  return h;
}

ModelFile parse_model_json(const ojson& j) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw FormatError("model file has no integer format_version");
  }
  const int version = j["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format_version " + std::to_string(version) + " (this build reads " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  const ojson& arch = j.at("architecture");
  NetworkSpec spec;
  spec.style = head_style_from_string(j.at("style").get<std::string>());
  spec.x_dim = arch.at("x_dim").get<std::size_t>();
  spec.y_dim = arch.at("y_dim").get<std::size_t>();
  spec.n_classes = arch.at("n_classes").get<std::size_t>();
  spec.mode = output_mode_from_string(arch.at("output_mode").get<std::string>());
  spec.skip = skip_mode_from_string(arch.at("skip_mode").get<std::string>());
  spec.identity_utility = arch.at("identity_utility").get<bool>();
  spec.readout_bias = arch.at("readout_bias").get<bool>();
  spec.restrict_y = arch.at("restrict_y").get<bool>();
  for (const auto& la : arch.at("layers")) {
    spec.layers.push_back(LayerArch{la.at("width").get<std::size_t>(), head_arch_from(la.at("u")),
                                    head_arch_from(la.at("c")), head_arch_from(la.at("t"))});
  }
  Network net(spec);
  const ojson& params = j.at("parameters");
  const ojson& layers = params.at("layers");
  if (!layers.is_array() || layers.size() != net.depth()) throw FormatError("parameter layer count mismatch");
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const BlockShape& sh = net.block_shape(l);
    if (!layers[l].is_array() || layers[l].size() != net.width(l)) {
      throw FormatError("layer " + std::to_string(l + 1) + " block count mismatch");
    }
    for (std::size_t b = 0; b < net.width(l); ++b) {
      auto p = net.block_params(l, b);
      for (int h = 0; h < 3; ++h) {
        const Head head = static_cast<Head>(h);
        const std::size_t rows = sh.rows(head);
        const std::size_t n = rows ? sh.head(head).basis->size() : 0;
        const std::string what = "L" + std::to_string(l + 1) + "B" + std::to_string(b + 1) + "." + kHeadKeys[h];
        const ojson& hj = layers[l][b].at(kHeadKeys[h]);
        read_vector(hj.at("lambda"), rows, p.data() + sh.lambda_offset(head), what + ".lambda");
        read_rows(hj.at("coeff"), rows, n, p.data() + sh.coeff_offset(head), what + ".coeff");
        if (sh.with_bias()) read_vector(hj.at("bias"), rows, p.data() + sh.bias_offset(head), what + ".bias");
      }
    }
  }
  std::size_t seen = 0;
  for (const auto& pj : params.at("projections")) {
    const std::size_t l = pj.at("layer").get<std::size_t>() - 1;
    if (l == 0 || l >= net.depth() || !net.has_projection(l)) throw FormatError("unexpected projection entry");
    read_rows(pj.at("weight"), net.width(l), net.width(l - 1), net.params().data() + net.projection_offset(l),
              "projection " + std::to_string(l + 1));
    ++seen;
  }
  std::size_t expected = 0;
  for (std::size_t l = 1; l < net.depth(); ++l) expected += net.has_projection(l) ? 1 : 0;
  if (seen != expected) throw FormatError("projection count mismatch");
  const ojson& readout = params.at("readout");
  read_rows(readout.at("weight"), net.output_dim(), net.width(net.depth() - 1),
            net.params().data() + net.readout_offset(), "readout.weight");
  if (net.has_readout_bias()) {
    read_vector(readout.at("bias"), net.output_dim(), net.params().data() + net.readout_bias_offset(), "readout.bias");
  }
  ModelFile file{GibbsModel(std::move(net), j.at("tau").get<double>()), {}, std::nullopt};
  const ojson& prov = j.at("provenance");
  file.provenance.seed = prov.at("seed").get<std::uint64_t>();
  file.provenance.config_digest = prov.at("config_digest").get<std::string>();
  file.provenance.library_version = prov.at("library_version").get<std::string>();
  if (j.contains("data")) {
    const ojson& d = j["data"];
    StoredData sd;
    sd.schema = schema_from(d.at("schema"));
    sd.prep = prep_from(d.at("preprocessing"));
    const auto r = d.at("split").at("ratios").get<std::vector<double>>();
    if (r.size() != 3) throw FormatError("split ratios need three entries");
    sd.ratios = {r[0], r[1], r[2]};
    sd.split_seed = d.at("split").at("seed").get<std::uint64_t>();
    file.data = std::move(sd);
  }
  return file;
}

}  // namespace

ModelFile parse_model(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    return parse_model_json(j);
  } catch (const ojson::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelFile& file) { write_file(path, serialize_model(file)); }

ModelFile load_model(const std::string& path) { return parse_model(read_file(path)); }

}  // namespace bl
