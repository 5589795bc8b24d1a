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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "bl/config.hpp"
#include "bl/data.hpp"
#include "bl/error.hpp"
#include "bl/gibbs.hpp"
#include "bl/interpret.hpp"
#include "bl/model_io.hpp"
#include "bl/training.hpp"

namespace bl::cli {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("'" + flag + "' expects comma-separated numbers, got '" + s + "'");
    }
  }
  return out;
}

std::vector<Example> examples(const EncodedSplit& s, bool with_labels, bool with_targets) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    Example e;
    const auto xr = s.x.row(i);
    e.x.assign(xr.begin(), xr.end());
    if (with_labels) e.label = s.labels[i];
    if (with_targets) {
      const auto yr = s.y.row(i);
      e.y.assign(yr.begin(), yr.end());
    }
    e.id = s.rows[i];
    out.push_back(std::move(e));
  }
  return out;
}

bool has_labels(const Network& net) { return net.spec().n_classes >= 2; }
bool has_targets(const Network& net) { return net.spec().y_dim > 0; }

Metrics classification_metrics(const GibbsModel& model, std::span<const Example> data) {
  Matrix probs(data.size(), model.net.spec().n_classes);
  std::vector<int> labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = class_probs(model, data[i].x,
                               model.net.mode() == OutputMode::kScalar ? std::span<const double>(data[i].y)
                                                                      : std::span<const double>());
    std::copy(p.begin(), p.end(), probs.row(i).begin());
    labels.push_back(data[i].label);
  }
  return compute_metrics(labels, probs);
}

void print_metrics(std::ostream& out, const std::string& split, const Metrics& m) {
  out << split << ".accuracy = " << fixed6(m.accuracy) << "\n"
      << split << ".f1_macro = " << fixed6(m.f1_macro) << "\n"
      << split << ".auc = " << fixed6(m.auc) << "\n"
      << split << ".ece = " << fixed6(m.ece) << "\n"
      << split << ".nll = " << fixed6(m.nll) << "\n";
}

// Default quadrature box for standardized continuous targets.
QuadratureGrid default_grid(std::size_t y_dim) {
  return QuadratureGrid{std::vector<double>(y_dim, -6.0), std::vector<double>(y_dim, 6.0), 241};
}

std::vector<std::string> response_names(const ModelFile& f) {
  if (!f.data) return {};
  const auto& spec = f.model.net.spec();
  if (spec.mode == OutputMode::kClassVector) return {};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < spec.n_classes; ++k) out.push_back(f.data->schema.label + "=" + f.data->prep.class_names[k]);
  for (const auto& t : f.data->schema.continuous_targets) out.push_back(t);
  return out;
}

std::vector<std::string> feature_names(const ModelFile& f) {
  return f.data ? f.data->prep.feature_names() : std::vector<std::string>{};
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config, data, out, history, metrics;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig rc = load_run_config(a.config);
  for (const auto& w : rc.warnings) err << "warning: " << w << "\n";
  if (rc.data.schema.features.empty()) throw ConfigError("'data.schema.features' is required for training");
  const RawDataset raw = load_csv(a.data, rc.data.schema);
  Dataset ds = preprocess_and_split(raw, rc.data.ratios, rc.data.seed);
  ds.prep.target_names = rc.data.schema.continuous_targets;
  for (const auto& w : ds.warnings) err << "warning: " << w << "\n";
  if (ds.split.val.empty()) throw ConfigError("validation split is empty; adjust 'data.ratios'");

  const std::size_t n_classes = raw.class_names.size();
  Network net(network_spec(rc.model, ds.prep.encoded_width(), n_classes, raw.targets.size()));
  initialize(net, rc.model.seed, rc.model.init);
  GibbsModel model(std::move(net), rc.model.tau);
  const bool labels = has_labels(model.net);
  const bool targets = has_targets(model.net);
  const auto tr = examples(ds.train, labels, targets);
  const auto va = examples(ds.val, labels, targets);
  const TrainResult res = train(model, tr, va, rc.loss, rc.train);

  ModelFile file{model, Provenance{rc.model.seed, rc.digest, library_version()},
                 StoredData{rc.data.schema, ds.prep, rc.data.ratios, rc.data.seed}};
  save_model(a.out, file);
  std::ostringstream hist;
  hist << "epoch,train_loss,val_loss,val_metric\n";
  for (const auto& r : res.history) {
    hist << r.epoch << ',' << num(r.train_loss) << ',' << num(r.val_loss) << ',' << num(r.val_metric) << "\n";
  }
  write_file(a.history.empty() ? a.out + ".history.csv" : a.history, hist.str());

  out << "epochs_run = " << res.history.size() << "\n"
      << "best_epoch = " << res.best_epoch << "\n"
      << "stopped_early = " << (res.stopped_early ? "true" : "false") << "\n";
  const double val_loss = hybrid_loss(model, rc.loss, va, 0, rc.train.exec, false).loss;
  out << "val.loss = " << fixed6(val_loss) << "\n";
  if (labels) {
    const Metrics m = classification_metrics(model, va);
    print_metrics(out, "val", m);
    if (!a.metrics.empty()) write_file(a.metrics, metrics_csv_header() + "\n" + metrics_csv_row("val", m) + "\n");
  }
  return kExitOk;
}

struct EvalArgs {
  std::string model, data, metrics, split = "test";
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile f = load_model(a.model);
  if (!f.data) throw FormatError("model file carries no preprocessing; it cannot evaluate raw data");
  const RawDataset raw = load_csv(a.data, f.data->schema);
  const Split split = make_split(raw.rows, f.data->ratios, f.data->split_seed);
  const std::vector<std::size_t>* rows = a.split == "train" ? &split.train : a.split == "val" ? &split.val : &split.test;
  std::vector<std::string> warnings;
  const EncodedSplit enc = encode_rows(raw, f.data->prep, *rows, &warnings);
  if (rows->empty()) throw ConfigError("the " + a.split + " split is empty");
  const GibbsModel& model = f.model;
  const auto data = examples(enc, has_labels(model.net), has_targets(model.net));
  out << "split = " << a.split << "\nrows = " << data.size() << "\n";
  if (has_labels(model.net)) {
    const Metrics m = classification_metrics(model, data);
    print_metrics(out, a.split, m);
    if (!a.metrics.empty()) write_file(a.metrics, metrics_csv_header() + "\n" + metrics_csv_row(a.split, m) + "\n");
  } else {
    const double nll = quadrature_nll(model, data, default_grid(model.net.spec().y_dim));
    out << a.split << ".nll = " << fixed6(nll) << "\n";
    if (!a.metrics.empty()) write_file(a.metrics, "split,nll\n" + a.split + "," + num(nll) + "\n");
  }
  return kExitOk;
}

struct SampleArgs {
  std::string model, x, out;
  std::size_t chains = 512, steps = 1500, burn_in = 0;
  double eta = 1e-4, init_scale = 1.0;
  std::uint64_t seed = 0;
  bool zero_noise = false;
};

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile f = load_model(a.model);
  const Network& net = f.model.net;
  if (net.mode() != OutputMode::kScalar || net.spec().n_classes != 0) {
    throw ModeError("sampling needs a scalar-energy model with a purely continuous response");
  }
  const auto x = a.x.empty() ? std::vector<double>() : parse_list(a.x, "--x");
  if (x.size() != net.x_dim()) {
    throw ConfigError("'--x' needs " + std::to_string(net.x_dim()) + " encoded feature values, got " + std::to_string(x.size()));
  }
  LangevinConfig cfg;
  cfg.step_size = a.eta;
  cfg.n_steps = a.steps;
  cfg.burn_in = a.burn_in;
  cfg.n_chains = a.chains;
  cfg.seed = a.seed;
  cfg.init_scale = a.init_scale;
  cfg.zero_noise = a.zero_noise;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const Matrix ys = langevin_sample(f.model, x, cfg);
  std::ostringstream csv;
  csv << "chain";
  auto names = response_names(f);
  for (std::size_t k = 0; k < ys.cols; ++k) csv << ',' << (names.empty() ? "y" + std::to_string(k + 1) : names[k]);
  csv << "\n";
  for (std::size_t c = 0; c < ys.rows; ++c) {
    csv << c;
    for (double v : ys.row(c)) csv << ',' << num(v);
    csv << "\n";
  }
  write_file(a.out, csv.str());
  out << "samples = " << ys.rows << "\nwritten = " << a.out << "\n";
  return kExitOk;
}

struct ExplainArgs {
  std::string model, block;
  std::size_t top_k = 3;
};

int cmd_explain(const ExplainArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile f = load_model(a.model);
  const Network& net = f.model.net;
  const auto base = network_input_names(net, feature_names(f), response_names(f));
  std::size_t only_l = 0, only_b = 0;
  bool single = false;
  if (!a.block.empty()) {
    unsigned l = 0, b = 0;
    char tail = 0;
    if (std::sscanf(a.block.c_str(), "L%uB%u%c", &l, &b, &tail) != 2 || l == 0 || b == 0) {
      throw ConfigError("'--block' expects a name like L1B2, got '" + a.block + "'");
    }
    if (l > net.depth() || b > net.width(l - 1)) throw ConfigError("block " + a.block + " is out of range");
    only_l = l - 1;
    only_b = b - 1;
    single = true;
  }
  for (std::size_t l = 0; l < net.depth(); ++l) {
    if (single && l != only_l) continue;
    const auto names = layer_input_names(net, l, base);
    const BlockShape& sh = net.block_shape(l);
    if (a.top_k < 1 || a.top_k > candidate_count(sh)) {
      throw ConfigError("'--top-k' must lie in [1, " + std::to_string(candidate_count(sh)) + "] for layer " +
                        std::to_string(l + 1));
    }
    if (!single && net.depth() > 1) {
      out << "-- layer " << l + 1 << (l == 0 ? " (micro: raw inputs)" : l + 1 == net.depth() ? " (macro)" : "") << " --\n";
    }
    for (std::size_t b = 0; b < net.width(l); ++b) {
      if (single && b != only_b) continue;
      out << "[" << block_name(l, b) << "]\n"
          << render_ump(extract_ump(sh, net.block_params(l, b), names, a.top_k)) << "\n";
    }
  }
  return kExitOk;
}

struct GraphArgs {
  std::string model, out;
  double threshold = 0.3;
};

int cmd_graph(const GraphArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile f = load_model(a.model);
  GraphOptions opt;
  opt.threshold = a.threshold;
  opt.x_names = feature_names(f);
  opt.y_names = response_names(f);
  write_file(a.out, export_graph(f.model.net, opt));
  out << "written = " << a.out << "\n";
  return kExitOk;
}

struct DiagnoseArgs {
  std::string config, out, lambda_sweep, tau_sweep, residual;
  std::optional<std::size_t> dim, steps, burn_in, chains;
  std::optional<double> eta, eps_tol, lambda, tau;
  std::optional<std::uint64_t> seed;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  DiagnosticConfig d = a.config.empty() ? DiagnosticConfig{} : load_run_config(a.config).diagnostic;
  if (a.dim) d.dim = *a.dim;
  if (a.steps) d.steps = *a.steps;
  if (a.burn_in) d.burn_in = *a.burn_in;
  if (a.chains) d.chains = *a.chains;
  if (a.eta) d.eta = *a.eta;
  if (a.eps_tol) d.eps_tol = *a.eps_tol;
  if (a.lambda) d.fixed_lambda = *a.lambda;
  if (a.tau) d.fixed_tau = *a.tau;
  if (a.seed) d.seed = *a.seed;
  if (!a.lambda_sweep.empty()) d.lambda_sweep = parse_list(a.lambda_sweep, "--lambda-sweep");
  if (!a.tau_sweep.empty()) d.tau_sweep = parse_list(a.tau_sweep, "--tau-sweep");
  if (!a.residual.empty()) d.residual = residual_scale_from_string(a.residual);
  d.validate();

  LangevinConfig cfg;
  cfg.step_size = d.eta;
  cfg.n_steps = d.steps;
  cfg.burn_in = d.burn_in;
  cfg.n_chains = d.chains;
  cfg.seed = d.seed;
  std::ostringstream csv;
  csv << "lambda,tau,eta,steps,burn_in,chains,dim,mean_violation,p95_violation,feasible_fraction\n";
  const auto run_row = [&](double lambda, double tau) {
    ViolationStats s;
    try {
      s = constraint_diagnostic(d.dim, lambda, tau, cfg, d.eps_tol, d.residual);
    } catch (const DivergenceError& e) {
      err << "note: lambda=" << num(lambda) << " tau=" << num(tau) << ": " << e.what()
          << "; row recorded as inf\n";
      s.mean_violation = s.p95_violation = std::numeric_limits<double>::infinity();
      s.feasible_fraction = 0.0;
    }
    csv << num(lambda) << ',' << num(tau) << ',' << num(d.eta) << ',' << d.steps << ',' << d.burn_in << ','
        << d.chains << ',' << d.dim << ',' << num(s.mean_violation) << ',' << num(s.p95_violation) << ','
        << num(s.feasible_fraction) << "\n";
    return s.mean_violation;
  };
  std::vector<double> tau_means;
  for (double t : d.tau_sweep) tau_means.push_back(run_row(d.fixed_lambda, t));
  std::vector<double> lambda_means;
  for (double l : d.lambda_sweep) lambda_means.push_back(run_row(l, d.fixed_tau));
  write_file(a.out, csv.str());

  out << "rows = " << d.tau_sweep.size() + d.lambda_sweep.size() << "\n";
  if (d.tau_sweep.size() >= 2) {
    out << "spearman(mean_violation, tau) at lambda=" << num(d.fixed_lambda) << " = "
        << fixed6(spearman(tau_means, d.tau_sweep)) << "\n";
  }
  if (d.lambda_sweep.size() >= 2) {
    out << "spearman(mean_violation, lambda) at tau=" << num(d.fixed_tau) << " = "
        << fixed6(spearman(lambda_means, d.lambda_sweep)) << "\n";
    std::vector<double> lv, mv;
    for (std::size_t i = 0; i < d.lambda_sweep.size(); ++i) {
      if (d.lambda_sweep[i] > 0.0) {
        lv.push_back(d.lambda_sweep[i]);
        mv.push_back(lambda_means[i]);
      }
    }
    if (lv.size() >= 2 && lv.size() < d.lambda_sweep.size()) {
      out << "spearman(mean_violation, lambda > 0) = " << fixed6(spearman(mv, lv)) << "\n";
    }
  }
  out << "written = " << a.out << "\n";
  return kExitOk;
}

struct GradcheckArgs {
  std::string model, data, config;
  std::size_t batch = 8;
  std::optional<double> h;
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile f = load_model(a.model);
  if (!f.data) throw FormatError("model file carries no preprocessing; it cannot read raw data");
  const RawDataset raw = load_csv(a.data, f.data->schema);
  const Split split = make_split(raw.rows, f.data->ratios, f.data->split_seed);
  std::vector<std::size_t> rows(split.train.begin(), split.train.begin() + static_cast<std::ptrdiff_t>(std::min(a.batch, split.train.size())));
  const EncodedSplit enc = encode_rows(raw, f.data->prep, rows, nullptr);
  const Network& net = f.model.net;
  const auto batch = examples(enc, has_labels(net), has_targets(net));
  LossConfig loss;
  if (!a.config.empty()) {
    loss = load_run_config(a.config).loss;
  } else {
    loss.gamma_d = has_labels(net) ? 1.0 : 0.0;
    loss.gamma_c = has_targets(net) ? 1.0 : 0.0;
  }
  // relu/abs kinks call for a short step on BL models
  const double step = a.h.value_or(net.style() == HeadStyle::kBL ? 1e-5 : 1e-3);
  const GradCheckResult r = finite_diff_check_detail(f.model, loss, batch, step, a.seed);
  out << "parameters = " << net.param_count() << "\n"
      << "max_rel_error = " << num(r.max_rel_error) << "\n"
      << "worst_index = " << r.worst_index << "\n"
      << "analytic = " << num(r.analytic) << "\nnumeric = " << num(r.numeric) << "\n"
      << "result = " << (r.max_rel_error <= a.tol ? "pass" : "fail") << "\n";
  return r.max_rel_error <= a.tol ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavior learning: train, inspect and sample compositional utility models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train a model from a config and a CSV file");
  train_cmd->add_option("--config", ta.config, "run config (JSON)")->required();
  train_cmd->add_option("--data", ta.data, "CSV data file")->required();
  train_cmd->add_option("--out", ta.out, "model file to write")->required();
  train_cmd->add_option("--history", ta.history, "history CSV (default: <out>.history.csv)");
  train_cmd->add_option("--metrics", ta.metrics, "validation metrics CSV");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a split of a CSV file");
  eval_cmd->add_option("--model", ea.model, "model file")->required();
  eval_cmd->add_option("--data", ea.data, "CSV data file")->required();
  eval_cmd->add_option("--metrics", ea.metrics, "metrics CSV to write");
  eval_cmd->add_option("--split", ea.split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "draw Langevin samples of the response");
  sample_cmd->add_option("--model", sa.model, "model file")->required();
  sample_cmd->add_option("--x", sa.x, "comma-separated encoded features");
  sample_cmd->add_option("--chains", sa.chains, "number of chains");
  sample_cmd->add_option("--steps", sa.steps, "Langevin steps per chain");
  sample_cmd->add_option("--burn-in", sa.burn_in, "burn-in steps (must not exceed --steps)");
  sample_cmd->add_option("--eta", sa.eta, "step size");
  sample_cmd->add_option("--init-scale", sa.init_scale, "std of the chain initial states");
  sample_cmd->add_option("--seed", sa.seed, "seed");
  sample_cmd->add_flag("--zero-noise", sa.zero_noise, "deterministic gradient ascent steps");
  sample_cmd->add_option("--out", sa.out, "samples CSV")->required();

  ExplainArgs xa;
  auto* explain_cmd = app.add_subcommand("explain", "print the symbolic optimization problem of each block");
  explain_cmd->add_option("--model", xa.model, "model file")->required();
  explain_cmd->add_option("--top-k", xa.top_k, "terms kept per head row");
  explain_cmd->add_option("--block", xa.block, "a single block, e.g. L1B2");

  GraphArgs ga;
  auto* graph_cmd = app.add_subcommand("graph", "export the computational structure as DOT");
  graph_cmd->add_option("--model", ga.model, "model file")->required();
  graph_cmd->add_option("--threshold", ga.threshold, "minimum |coefficient| for an edge");
  graph_cmd->add_option("--out", ga.out, "DOT file")->required();

  DiagnoseArgs da;
  auto* diag_cmd = app.add_subcommand("diagnose-constraint", "penalty-constraint violation sweeps under Langevin sampling");
  diag_cmd->add_option("--config", da.config, "run config with a diagnostic section");
  diag_cmd->add_option("--dim", da.dim, "dimension of x and y");
  diag_cmd->add_option("--lambda-sweep", da.lambda_sweep, "comma-separated penalty weights");
  diag_cmd->add_option("--tau-sweep", da.tau_sweep, "comma-separated temperatures");
  diag_cmd->add_option("--lambda", da.lambda, "penalty weight for the temperature sweep");
  diag_cmd->add_option("--tau", da.tau, "temperature for the penalty sweep");
  diag_cmd->add_option("--eta", da.eta, "step size");
  diag_cmd->add_option("--steps", da.steps, "Langevin steps");
  diag_cmd->add_option("--burn-in", da.burn_in, "burn-in steps");
  diag_cmd->add_option("--chains", da.chains, "chains per configuration");
  diag_cmd->add_option("--eps-tol", da.eps_tol, "feasibility tolerance");
  diag_cmd->add_option("--seed", da.seed, "seed");
  diag_cmd->add_option("--residual", da.residual, "sum or mean")->check(CLI::IsMember({"sum", "mean"}));
  diag_cmd->add_option("--out", da.out, "violations CSV")->required();

  GradcheckArgs gc;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  grad_cmd->add_option("--model", gc.model, "model file")->required();
  grad_cmd->add_option("--data", gc.data, "CSV data file")->required();
  grad_cmd->add_option("--config", gc.config, "run config whose loss section is used");
  grad_cmd->add_option("--batch", gc.batch, "training rows in the batch");
  grad_cmd->add_option("--step", gc.h, "finite-difference step (default 1e-5 for BL, 1e-3 for IBL)");
  grad_cmd->add_option("--tol", gc.tol, "pass threshold");
  grad_cmd->add_option("--seed", gc.seed, "noise seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(ta, out, err);
    if (*eval_cmd) return cmd_eval(ea, out, err);
    if (*sample_cmd) return cmd_sample(sa, out, err);
    if (*explain_cmd) return cmd_explain(xa, out, err);
    if (*graph_cmd) return cmd_graph(ga, out, err);
    if (*diag_cmd) return cmd_diagnose(da, out, err);
    if (*grad_cmd) return cmd_gradcheck(gc, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "model file error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModeError& e) {
    err << "mode error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bl::cli
