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

#include "bl/config.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"

#include "bl/error.hpp"
#include "bl/model_io.hpp"

namespace bl {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Reads one JSON object, tracking which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    used_.insert(k);
    const auto it = j_.find(k);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  double real(const std::string& k, double def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError("'" + key(k) + "' must be a number");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& k, std::uint64_t def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
      throw ConfigError("'" + key(k) + "' must be a nonnegative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool flag(const std::string& k, bool def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError("'" + key(k) + "' must be true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& k, const std::string& def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError("'" + key(k) + "' must be a string");
    return v->get<std::string>();
  }

  std::vector<double> reals(const std::string& k, std::vector<double> def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_array()) throw ConfigError("'" + key(k) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError("'" + key(k) + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> texts(const std::string& k) {
    const json* v = find(k);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError("'" + key(k) + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) throw ConfigError("'" + key(k) + "' must be an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  template <class F>
  auto parsed(const std::string& k, F&& f) -> decltype(f(std::string())) {
    try {
      return f(text(k, ""));
    } catch (const ConfigError& e) {
      throw ConfigError("'" + key(k) + "': " + e.what());
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError("unknown key '" + key(k) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

HeadArch parse_head(const json& j, const std::string& path) {
  Section s(j, path);
  HeadArch h;
  h.rank = s.count("rank", 1);
  h.degree = static_cast<int>(s.count("degree", 1));
  if (const json* e = s.find("extra")) {
    if (!e->is_array()) throw ConfigError("'" + path + ".extra' must be an array of exponent arrays");
    for (const auto& row : *e) {
      if (!row.is_array()) throw ConfigError("'" + path + ".extra' must be an array of exponent arrays");
      Exponent ex;
      for (const auto& v : row) {
        if (!v.is_number_integer() || v.get<int>() < 0) {
          throw ConfigError("'" + path + ".extra' exponents must be nonnegative integers");
        }
        ex.push_back(v.get<int>());
      }
      h.extra.push_back(std::move(ex));
    }
  }
  s.finish();
  return h;
}

void parse_model(const json& j, ModelConfig& m) {
  Section s(j, "model");
  m.style = s.parsed("style", [](const std::string& v) { return v.empty() ? HeadStyle::kBL : head_style_from_string(v); });
  const std::string mode = s.text("output_mode", "");
  if (!mode.empty()) {
    try {
      m.mode = output_mode_from_string(mode);
    } catch (const Error& e) {
      throw ConfigError("'model.output_mode': " + std::string(e.what()));
    }
  }
  m.skip = s.parsed("skip", [](const std::string& v) { return v.empty() ? SkipMode::kNone : skip_mode_from_string(v); });
  m.identity_utility = s.flag("identity_utility", false);
  if (const json* rb = s.find("readout_bias")) {
    if (!rb->is_boolean()) throw ConfigError("'model.readout_bias' must be true or false");
    m.readout_bias = rb->get<bool>();
  }
  m.restrict_y = s.flag("restrict_y", true);
  m.tau = s.real("tau", 1.0);
  if (!(m.tau > 0.0)) throw ConfigError("'model.tau' must be positive");
  m.seed = s.count("seed", 0);
  if (const json* layers = s.find("layers")) {
    if (!layers->is_array() || layers->empty()) throw ConfigError("'model.layers' must be a nonempty array");
    m.layers.clear();
    for (std::size_t l = 0; l < layers->size(); ++l) {
      const std::string path = "model.layers[" + std::to_string(l) + "]";
      Section ls((*layers)[l], path);
      LayerArch a;
      a.width = ls.count("width", 1);
      if (a.width == 0) throw ConfigError("'" + path + ".width' must be >= 1");
      for (const char* h : {"u", "c", "t"}) {
        HeadArch head;
        if (const json* hj = ls.find(h)) head = parse_head(*hj, path + "." + h);
        (h[0] == 'u' ? a.u : h[0] == 'c' ? a.c : a.t) = head;
      }
      ls.finish();
      m.layers.push_back(a);
    }
  }
  if (const json* init = s.find("init")) {
    Section is(*init, "model.init");
    m.init.sigma_params = is.real("sigma", m.init.sigma_params);
    m.init.lambda_mean = is.real("lambda_mean", m.init.lambda_mean);
    m.init.sigma_lambda = is.real("sigma_lambda", m.init.sigma_lambda);
    is.finish();
  }
  s.finish();
}

void parse_loss(const json& j, LossConfig& l) {
  Section s(j, "loss");
  l.gamma_d = s.real("gamma_d", l.gamma_d);
  l.gamma_c = s.real("gamma_c", l.gamma_c);
  l.sigma = s.real("sigma", l.sigma);
  l.dsm_prefactor = s.flag("dsm_prefactor", l.dsm_prefactor);
  s.finish();
  try {
    l.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (section 'loss')");
  }
}

void parse_train(const json& j, TrainConfig& t, std::vector<std::string>& warnings) {
  Section s(j, "train");
  t.learning_rate = s.real("learning_rate", t.learning_rate);
  t.batch_size = s.count("batch_size", t.batch_size);
  t.epochs = s.count("epochs", t.epochs);
  t.max_grad_norm = s.real("max_grad_norm", t.max_grad_norm);
  t.weight_decay = s.real("weight_decay", t.weight_decay);
  t.patience = s.count("patience", t.patience);
  t.seed = s.count("seed", t.seed);
  t.optimizer = s.parsed("optimizer", [&](const std::string& v) { return v.empty() ? t.optimizer : optimizer_from_string(v); });
  const std::string monitor = s.text("monitor", "val_loss");
  if (monitor == "val_loss") {
    t.monitor = Monitor::kValLoss;
  } else if (monitor == "quadrature_nll") {
    t.monitor = Monitor::kQuadratureNll;
  } else {
    throw ConfigError("'train.monitor' must be val_loss or quadrature_nll");
  }
  if (const json* q = s.find("quadrature")) {
    Section qs(*q, "train.quadrature");
    t.quadrature.lo = qs.reals("lo", {});
    t.quadrature.hi = qs.reals("hi", {});
    t.quadrature.points_per_dim = qs.count("points", 201);
    qs.finish();
  }
  t.exec = s.flag("parallel", true) ? Exec::kParallel : Exec::kSerial;
  s.finish();
  if (!(t.learning_rate >= 0.0)) throw ConfigError("'train.learning_rate' must be nonnegative");
  if (t.batch_size < 1) throw ConfigError("'train.batch_size' must be >= 1");
  if (t.patience < 1) throw ConfigError("'train.patience' must be >= 1");
  if (!(t.max_grad_norm > 0.0)) throw ConfigError("'train.max_grad_norm' must be positive");
  if (!(t.weight_decay >= 0.0)) throw ConfigError("'train.weight_decay' must be >= 0");
  if (t.monitor == Monitor::kQuadratureNll && t.quadrature.points_per_dim < 16) {
    throw ConfigError("'train.quadrature.points' must be >= 16");
  }
  const auto range = [&](const char* k, double v, double lo, double hi) {
    if (v < lo || v > hi) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "train.%s = %g is outside the usual tuning range [%g, %g]", k, v, lo, hi);
      warnings.emplace_back(buf);
    }
  };
  range("learning_rate", t.learning_rate, 1e-3, 1e-1);
  range("max_grad_norm", t.max_grad_norm, 1.0, 5.0);
}

void parse_data(const json& j, DataConfig& d) {
  Section s(j, "data");
  if (const json* sj = s.find("schema")) {
    Section ss(*sj, "data.schema");
    if (const json* f = ss.find("features")) {
      if (!f->is_array()) throw ConfigError("'data.schema.features' must be an array");
      for (std::size_t i = 0; i < f->size(); ++i) {
        const std::string path = "data.schema.features[" + std::to_string(i) + "]";
        Section fs((*f)[i], path);
        ColumnSpec c;
        c.name = fs.text("name", "");
        if (c.name.empty()) throw ConfigError("'" + path + ".name' is required");
        c.kind = fs.parsed("kind", [](const std::string& v) { return v.empty() ? ColumnKind::kContinuous : column_kind_from_string(v); });
        c.levels = fs.texts("levels");
        fs.finish();
        d.schema.features.push_back(std::move(c));
      }
    }
    d.schema.label = ss.text("label", "");
    d.schema.classes = ss.texts("classes");
    d.schema.continuous_targets = ss.texts("continuous_targets");
    ss.finish();
  }
  const auto r = s.reals("ratios", {0.7, 0.1, 0.2});
  if (r.size() != 3) throw ConfigError("'data.ratios' must have three entries");
  d.ratios = {r[0], r[1], r[2]};
  d.seed = s.count("seed", 0);
  s.finish();
}

void parse_diagnostic(const json& j, DiagnosticConfig& d) {
  Section s(j, "diagnostic");
  d.dim = s.count("dim", d.dim);
  d.lambda_sweep = s.reals("lambda_sweep", d.lambda_sweep);
  d.tau_sweep = s.reals("tau_sweep", d.tau_sweep);
  d.fixed_lambda = s.real("fixed_lambda", d.fixed_lambda);
  d.fixed_tau = s.real("fixed_tau", d.fixed_tau);
  d.eta = s.real("eta", d.eta);
  d.steps = s.count("steps", d.steps);
  d.burn_in = s.count("burn_in", d.burn_in);
  d.chains = s.count("chains", d.chains);
  d.eps_tol = s.real("eps_tol", d.eps_tol);
  d.seed = s.count("seed", d.seed);
  d.residual = s.parsed("residual", [](const std::string& v) { return v.empty() ? ResidualScale::kSum : residual_scale_from_string(v); });
  s.finish();
  d.validate();
}

}  // namespace

void DiagnosticConfig::validate() const {
  if (dim < 1) throw ConfigError("'diagnostic.dim' must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("'diagnostic.eta' must be positive");
  if (chains < 1) throw ConfigError("'diagnostic.chains' must be >= 1");
  if (burn_in > steps) throw ConfigError("'diagnostic.burn_in' must not exceed 'diagnostic.steps'");
  if (!(eps_tol > 0.0)) throw ConfigError("'diagnostic.eps_tol' must be positive");
  if (!(fixed_tau > 0.0)) throw ConfigError("'diagnostic.fixed_tau' must be positive");
  if (!(fixed_lambda >= 0.0)) throw ConfigError("'diagnostic.fixed_lambda' must be >= 0");
  for (double t : tau_sweep) {
    if (!(t > 0.0)) throw ConfigError("'diagnostic.tau_sweep' entries must be positive");
  }
  for (double l : lambda_sweep) {
    if (!(l >= 0.0)) throw ConfigError("'diagnostic.lambda_sweep' entries must be >= 0");
  }
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc;
  rc.digest = fnv1a_hex(text);
  Section top(j, "");
  if (const json* m = top.find("model")) parse_model(*m, rc.model);
  if (const json* l = top.find("loss")) parse_loss(*l, rc.loss);
  if (const json* t = top.find("train")) parse_train(*t, rc.train, rc.warnings);
  if (const json* d = top.find("data")) parse_data(*d, rc.data);
  if (const json* d = top.find("diagnostic")) parse_diagnostic(*d, rc.diagnostic);
  top.finish();
  return rc;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

NetworkSpec network_spec(const ModelConfig& m, std::size_t x_dim, std::size_t n_classes,
                         std::size_t y_dim) {
  NetworkSpec spec;
  spec.x_dim = x_dim;
  spec.style = m.style;
  spec.skip = m.skip;
  spec.identity_utility = m.identity_utility;
  spec.readout_bias = m.readout_bias;
  spec.restrict_y = m.restrict_y;
  spec.layers = m.layers;
  spec.mode = m.mode.value_or(y_dim == 0 && n_classes >= 2 ? OutputMode::kClassVector : OutputMode::kScalar);
  spec.n_classes = n_classes;
  spec.y_dim = spec.mode == OutputMode::kScalar ? y_dim : 0;
  if (spec.mode == OutputMode::kClassVector && y_dim > 0) {
    throw ConfigError("'model.output_mode' class_vector cannot model continuous targets");
  }
  return spec;
}

}  // namespace bl
