/*
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "otafl/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "otafl/errors.hpp"

#ifndef OTAFL_VERSION
#define OTAFL_VERSION "0.1.0"
#endif

namespace otafl {

namespace {

// clang-format off
constexpr std::array kSchema = {
  ConfigKey{"name", ValueKind::kString, "experiment", nullptr, "prefix of output file names"},
  ConfigKey{"output_dir", ValueKind::kString, "out", nullptr, "directory for CSV outputs"},
  ConfigKey{"model", ValueKind::kChoice, nullptr, "logistic|mlp|quadratic", "model family"},
  ConfigKey{"hidden", ValueKind::kInteger, "32", nullptr, "mlp hidden units"},
  ConfigKey{"activation", ValueKind::kChoice, "relu", "relu|tanh", "mlp activation"},
  ConfigKey{"data_csv", ValueKind::kString, "", nullptr, "labelled CSV; empty = synthetic"},
  ConfigKey{"label_column", ValueKind::kString, "label", nullptr, "label column of data_csv"},
  ConfigKey{"samples", ValueKind::kInteger, "2000", nullptr, "synthetic samples"},
  ConfigKey{"features", ValueKind::kInteger, "20", nullptr, "synthetic feature dimension"},
  ConfigKey{"classes", ValueKind::kInteger, "2", nullptr, "synthetic classes"},
  ConfigKey{"separation", ValueKind::kReal, "1.5", nullptr, "distance between class means"},
  ConfigKey{"test_fraction", ValueKind::kReal, "0.2", nullptr, "held-out share"},
  ConfigKey{"partition", ValueKind::kChoice, "dirichlet", "dirichlet|iid", "client split"},
  ConfigKey{"dirichlet", ValueKind::kReal, "0.3", nullptr, "Dirichlet concentration"},
  ConfigKey{"quad_dim", ValueKind::kInteger, "10", nullptr, "quadratic dimension"},
  ConfigKey{"quad_eig_min", ValueKind::kReal, "0.1", nullptr, "smallest client eigenvalue"},
  ConfigKey{"quad_eig_max", ValueKind::kReal, "1", nullptr, "largest client eigenvalue"},
  ConfigKey{"quad_b_scale", ValueKind::kReal, "1", nullptr, "std of the linear terms"},
  ConfigKey{"clients", ValueKind::kInteger, "50", nullptr, "N"},
  ConfigKey{"rounds", ValueKind::kInteger, "200", nullptr, "K"},
  ConfigKey{"eta", ValueKind::kReal, "0.03", nullptr, "server learning rate"},
  ConfigKey{"local_epochs", ValueKind::kInteger, "5", nullptr, "E"},
  ConfigKey{"batch_size", ValueKind::kInteger, "10", nullptr, "local batch; 0 = full"},
  ConfigKey{"local_lr", ValueKind::kReal, "0", nullptr, "local learning rate; 0 = eta"},
  ConfigKey{"eval_every", ValueKind::kInteger, "1", nullptr, "accuracy cadence in rounds"},
  ConfigKey{"projection_radius", ValueKind::kOptionalReal, "", nullptr, "project w onto a ball"},
  ConfigKey{"alpha", ValueKind::kReal, "1.5", nullptr, "noise tail index"},
  ConfigKey{"tau", ValueKind::kReal, "0.1", nullptr, "noise scale"},
  ConfigKey{"fading", ValueKind::kString, "rayleigh", nullptr,
            "rayleigh | none | rayleigh_scale:<sigma> | deterministic:<h>"},
  ConfigKey{"methods", ValueKind::kChoiceList, "mac,gnc,none,ideal", "mac|gnc|none|ideal",
            "methods compared by train"},
  ConfigKey{"mac_threshold", ValueKind::kReal, "1", nullptr, "MAC C"},
  ConfigKey{"gnc_threshold", ValueKind::kReal, "1", nullptr, "GNC C"},
  ConfigKey{"clip_grid", ValueKind::kRealList, "0.5,1,2", nullptr, "sweep thresholds"},
  ConfigKey{"seeds", ValueKind::kInteger, "10", nullptr, "sweep seeds"},
  ConfigKey{"seed", ValueKind::kInteger, "0", nullptr, "base seed"},
};
// clang-format on

const ConfigKey* find_key(const std::string& name) {
  for (const auto& k : kSchema) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_integer(const std::string& s) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

bool in_choices(const std::string& v, const char* choices) {
  for (const auto& c : split(choices, '|')) {
    if (v == c) return true;
  }
  return false;
}

// Empty string when valid, otherwise the reason.
std::string check_value(const ConfigKey& key, const std::string& v) {
  switch (key.kind) {
    case ValueKind::kReal:
      return parse_real(v) ? "" : "expected a finite number, got \"" + v + "\"";
    case ValueKind::kOptionalReal:
      return v.empty() || parse_real(v) ? "" : "expected a number or nothing, got \"" + v + "\"";
    case ValueKind::kInteger:
      return parse_integer(v) ? "" : "expected a non-negative integer, got \"" + v + "\"";
    case ValueKind::kString:
      return "";
    case ValueKind::kRealList:
      if (v.empty()) return "expected a comma-separated list of numbers";
      for (const auto& item : split(v, ',')) {
        if (!parse_real(item)) return "bad list entry \"" + item + "\"";
      }
      return "";
    case ValueKind::kChoice:
      return in_choices(v, key.choices)
                 ? ""
                 : "expected one of " + std::string(key.choices) + ", got \"" + v + "\"";
    case ValueKind::kChoiceList:
      if (v.empty()) return "expected a comma-separated list";
      for (const auto& item : split(v, ',')) {
        if (!in_choices(item, key.choices)) {
          return "unknown entry \"" + item + "\" (expected " + std::string(key.choices) + ")";
        }
      }
      return "";
  }
  return "unsupported kind";
}

FadingModel parse_fading(const std::string& s) {
  if (s == "rayleigh") return FadingModel::rayleigh_unit_mean();
  if (s == "none") return FadingModel::none();
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string kind = s.substr(0, colon);
    const auto v = parse_real(s.substr(colon + 1));
    if (v && kind == "rayleigh_scale") return FadingModel::rayleigh_scale(*v);
    if (v && kind == "deterministic") return FadingModel::deterministic(*v);
  }
  throw ConfigError("fading: unrecognised value \"" + s + "\"");
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

const char* version_string() { return "otafl " OTAFL_VERSION; }

std::span<const ConfigKey> config_schema() { return kSchema; }

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : kSchema) {
    if (k.default_value) values_[k.name] = k.default_value;
  }
}

void ExperimentConfig::set_checked(const std::string& key, const std::string& value) {
  const ConfigKey* k = find_key(key);
  if (!k) throw ConfigError("unknown key \"" + key + "\"");
  const std::string why = check_value(*k, value);
  if (!why.empty()) throw ConfigError(key + ": " + why);
  values_[key] = value;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  set_checked(trim(key), trim(value));
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override \"" + assignment + "\" is not of the form key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    }
    const std::string key = trim(body.substr(0, eq));
    try {
      cfg.set(key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no, key);
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required field \"" + key + "\"");
  return it->second;
}

bool ExperimentConfig::has(const std::string& key) const { return values_.count(key) > 0; }

double ExperimentConfig::real(const std::string& key) const {
  const auto v = parse_real(get(key));
  if (!v) throw ConfigError(key + ": not a number");
  return *v;
}

std::uint64_t ExperimentConfig::integer(const std::string& key) const {
  const auto v = parse_integer(get(key));
  if (!v) throw ConfigError(key + ": not an integer");
  return *v;
}

std::vector<double> ExperimentConfig::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(get(key), ',')) {
    const auto v = parse_real(item);
    if (!v) throw ConfigError(key + ": bad entry \"" + item + "\"");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::list(const std::string& key) const {
  return split(get(key), ',');
}

void ExperimentConfig::validate() const {
  for (const auto& k : kSchema) {
    if (!has(k.name)) throw ConfigError("missing required field \"" + std::string(k.name) + "\"");
  }
  auto positive = [&](const char* key) {
    if (!(real(key) > 0.0)) throw ConfigError(std::string(key) + ": must be > 0");
  };
  auto at_least_one = [&](const char* key) {
    if (integer(key) < 1) throw ConfigError(std::string(key) + ": must be >= 1");
  };
  at_least_one("clients");
  at_least_one("rounds");
  at_least_one("local_epochs");
  at_least_one("eval_every");
  at_least_one("seeds");
  positive("eta");
  positive("tau");
  positive("dirichlet");
  positive("quad_eig_min");
  if (real("alpha") <= 0.0 || real("alpha") > 2.0) throw ConfigError("alpha: must lie in (0, 2]");
  if (real("local_lr") < 0.0) throw ConfigError("local_lr: must be >= 0");
  const double tf = real("test_fraction");
  if (!(tf > 0.0 && tf < 1.0)) throw ConfigError("test_fraction: must lie in (0, 1)");
  if (get("output_dir").empty()) throw ConfigError("output_dir: must not be empty");
  if (get("name").empty()) throw ConfigError("name: must not be empty");
  const std::string model = get("model");
  if (model != "quadratic") {
    if (get("data_csv").empty()) {
      at_least_one("features");
      if (integer("classes") < 2) throw ConfigError("classes: must be >= 2");
      if (integer("samples") < integer("clients")) {
        throw ConfigError("samples: fewer samples than clients");
      }
    }
    if (model == "mlp") at_least_one("hidden");
  } else {
    at_least_one("quad_dim");
  }
  parse_fading(get("fading"));
  for (Method m : methods()) {
    if (m == Method::kMac || m == Method::kGnc) {
      const std::string key = to_string(m) + "_threshold";
      if (!(real(key) > 0.0)) throw ConfigError(key + ": must be > 0");
    }
  }
  for (double c : real_list("clip_grid")) {
    if (!(c > 0.0)) throw ConfigError("clip_grid: thresholds must be > 0");
  }
  fl_config().validate();
}

std::string ExperimentConfig::resolved() const {
  std::string out;
  for (const auto& k : kSchema) {
    if (!out.empty()) out += ' ';
    out += k.name;
    out += '=';
    const auto it = values_.find(k.name);
    out += it == values_.end() ? "<missing>" : it->second;
  }
  return out;
}

FLConfig ExperimentConfig::fl_config() const {
  FLConfig f;
  f.n_clients = integer("clients");
  f.rounds = integer("rounds");
  f.learning_rate = real("eta");
  f.local_epochs = integer("local_epochs");
  f.batch_size = integer("batch_size");
  f.local_lr = real("local_lr");
  f.eval_every = integer("eval_every");
  if (!get("projection_radius").empty()) f.projection_radius = real("projection_radius");
  f.channel.fading = parse_fading(get("fading"));
  f.channel.noise = StableParams{real("alpha"), real("tau")};
  f.channel.noise_enabled = true;
  f.seed = integer("seed");
  return f;
}

std::vector<Method> ExperimentConfig::methods() const {
  std::vector<Method> out;
  for (const auto& name : list("methods")) {
    const Method m = parse_method(name);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

double ExperimentConfig::threshold_for(Method m) const {
  switch (m) {
    case Method::kMac: return real("mac_threshold");
    case Method::kGnc: return real("gnc_threshold");
    default: return 0.0;
  }
}

Problem ExperimentConfig::make_problem(std::uint64_t seed) const {
  const std::size_t n_clients = integer("clients");
  const std::string model = get("model");
  if (model == "quadratic") {
    QuadraticTestbedSpec q;
    q.dim = integer("quad_dim");
    q.n_clients = n_clients;
    q.eig_min = real("quad_eig_min");
    q.eig_max = real("quad_eig_max");
    q.b_scale = real("quad_b_scale");
    q.seed = seed;
    return make_quadratic_testbed(q);
  }

  Dataset all;
  if (get("data_csv").empty()) {
    Rng data_rng(derive_seed(seed, Stream::kData));
    all = make_synthetic_classification(integer("samples"), integer("features"), integer("classes"),
                                        real("separation"), data_rng);
  } else {
    all = load_csv_dataset(get("data_csv"), get("label_column"));
  }
  Rng split_rng(derive_seed(seed, Stream::kSplit));
  auto [train, test] = split_train_test(all, real("test_fraction"), split_rng);

  PartitionSpec ps;
  ps.kind = get("partition") == "iid" ? PartitionSpec::Kind::kIid : PartitionSpec::Kind::kDirichlet;
  ps.concentration = real("dirichlet");
  ps.n_clients = n_clients;
  ps.seed = derive_seed(seed, Stream::kPartition);

  const std::size_t p = all.feature_dim();
  const std::size_t k = std::max<std::size_t>(2, all.n_classes());
  ModelSpec spec = model == "logistic"
                       ? make_logistic(p, k)
                       : make_mlp(p, integer("hidden"), k,
                                  get("activation") == "tanh" ? Activation::kTanh
                                                              : Activation::kRelu);
  return Problem{std::move(spec), partition(train, ps), std::move(test)};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf.data(), p);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& command,
                     const std::string& config_line, const std::vector<std::string>& columns)
    : path_(path), n_columns_(columns.size()) {
  buffer_ = "# " + std::string(version_string()) + " " + command + " " + config_line + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) {
    throw StructureError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(n_columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path_.parent_path().string());
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path_.string() + " for writing");
  out << buffer_;
  out.flush();
  if (!out) throw IoError("failed writing " + path_.string());
}

TrainOutput cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::filesystem::path dir = cfg.get("output_dir");
  const std::string name = cfg.get("name");
  const FLConfig base = cfg.fl_config();
  const Problem problem = cfg.make_problem(base.seed);
  const std::string header = cfg.resolved();

  TrainOutput out;
  CsvWriter summary(dir / (name + "_summary.csv"), "train", header,
                    {"method", "threshold", "rounds_completed", "final_loss", "final_accuracy",
                     "best_accuracy", "diverged"});
  for (Method m : cfg.methods()) {
    const FLConfig fl = config_for_method(base, m, cfg.threshold_for(m));
    const RunResult run = run_training(problem, fl);
    const auto path = dir / (name + "_" + to_string(m) + ".csv");
    CsvWriter csv(path, "train", header,
                  {"round", "loss", "grad_norm_sq", "snr_db", "clipped_fraction", "accuracy",
                   "diverged"});
    std::optional<double> best;
    for (const auto& r : run.records) {
      if (r.eval_accuracy) best = std::max(best.value_or(0.0), *r.eval_accuracy);
      csv.row({std::to_string(r.round), format_number(r.global_loss),
               format_number(r.grad_norm_sq), opt_number(r.snr_db),
               format_number(r.overall_clipped_fraction(problem.model.block_layout())),
               opt_number(r.eval_accuracy), r.diverged ? "1" : "0"});
    }
    csv.close();
    out.files.push_back(path);
    if (run.final_eval.accuracy) best = std::max(best.value_or(0.0), *run.final_eval.accuracy);
    summary.row({to_string(m),
                 m == Method::kMac || m == Method::kGnc ? format_number(fl.clip.threshold) : "",
                 std::to_string(run.records.size()), format_number(run.final_eval.loss),
                 opt_number(run.final_eval.accuracy), opt_number(best),
                 run.diverged ? "1" : "0"});
    if (run.diverged) ++out.diverged_methods;
    log << to_string(m) << ": " << run.records.size() << " rounds, final loss "
        << format_number(run.final_eval.loss);
    if (run.final_eval.accuracy) log << ", accuracy " << format_number(*run.final_eval.accuracy);
    if (run.diverged) log << " (" << run.diagnostic << ")";
    log << '\n';
  }
  summary.close();
  out.files.push_back(dir / (name + "_summary.csv"));
  return out;
}

std::filesystem::path cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::vector<Method> methods;
  for (Method m : cfg.methods()) {
    if (m == Method::kMac || m == Method::kGnc) methods.push_back(m);
  }
  if (methods.empty()) throw ConfigError("methods: sweep needs mac or gnc");
  const auto grid = cfg.real_list("clip_grid");
  const FLConfig base = cfg.fl_config();
  const auto rows = sweep_thresholds([&](std::uint64_t s) { return cfg.make_problem(s); }, base,
                                     methods, grid, cfg.integer("seeds"));
  const auto path =
      std::filesystem::path(cfg.get("output_dir")) / (cfg.get("name") + "_sweep.csv");
  CsvWriter csv(path, "sweep", cfg.resolved(),
                {"method", "C", "median_final_accuracy", "median_final_loss", "diverged_runs",
                 "best"});
  for (const auto& r : rows) {
    csv.row({to_string(r.method), format_number(r.threshold),
             std::isnan(r.median_accuracy) ? "" : format_number(r.median_accuracy),
             format_number(r.median_loss), std::to_string(r.diverged_runs), r.best ? "1" : "0"});
    if (r.best) {
      log << to_string(r.method) << ": best C = " << format_number(r.threshold) << '\n';
    }
  }
  csv.close();
  return path;
}

void cmd_lemma1(const Lemma1Options& opts, std::ostream& log) {
  const Lemma1Config& c = opts.config;
  const Lemma1Report rep = lemma1_report(c);
  const bool oracle = std::any_of(rep.rows.begin(), rep.rows.end(),
                                  [](const Lemma1Row& r) { return r.oracle_clip_prob.has_value(); });

  std::ostringstream cfg_line;
  cfg_line << "alphas=";
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    cfg_line << (i ? "," : "") << format_number(c.alphas[i]);
  }
  cfg_line << " tau=" << format_number(c.tau) << " c_grid=";
  for (std::size_t i = 0; i < c.c_grid.size(); ++i) {
    cfg_line << (i ? "," : "") << format_number(c.c_grid[i]);
  }
  cfg_line << " grad_bound=" << format_number(c.grad_bound) << " samples=" << c.n_samples
           << " seed=" << c.seed
           << " law=" << (c.law == DifferenceLaw::kStability ? "stability" : "sqrt2");

  std::vector<std::string> cols{"alpha", "C", "empirical_clip_prob", "asymptote", "fitted_slope"};
  if (oracle) cols.push_back("oracle_abs_error");
  cols.push_back("status");
  CsvWriter csv(opts.output, "lemma1", cfg_line.str(), cols);
  for (const auto& fit : rep.fits) {
    for (const auto& r : rep.rows) {
      if (r.alpha != fit.alpha) continue;
      std::vector<std::string> cells{format_number(r.alpha), format_number(r.clip),
                                     r.regime_violation ? "" : format_number(r.empirical_clip_prob),
                                     format_number(r.asymptote), ""};
      if (oracle) {
        cells.push_back(r.oracle_clip_prob && !r.regime_violation
                            ? format_number(std::abs(r.empirical_clip_prob - *r.oracle_clip_prob))
                            : "");
      }
      cells.push_back(r.regime_violation            ? "regime_violation"
                      : r.outside_asymptotic_regime ? "outside_asymptotic_regime"
                                                    : "ok");
      csv.row(cells);
    }
    std::vector<std::string> slope{format_number(fit.alpha), "", "", "",
                                   std::isnan(fit.slope) ? "" : format_number(fit.slope)};
    if (oracle) slope.push_back("");
    slope.push_back("slope");
    csv.row(slope);
    log << "alpha " << format_number(fit.alpha) << ": fitted slope "
        << (std::isnan(fit.slope) ? std::string("n/a") : format_number(fit.slope)) << '\n';
  }
  csv.close();
}

void cmd_theorem1(const Theorem1Options& opts, std::ostream& log) {
  Theorem1Config tc(make_quadratic_testbed(opts.testbed), opts.base);
  tc.k_grid = opts.k_grid;
  tc.n_seeds = opts.n_seeds;
  tc.base.n_clients = opts.testbed.n_clients;
  tc.measure_p_c = opts.measure_p_c;
  tc.eta_grid = opts.eta_grid;
  const Theorem1Report rep = verify_theorem1(tc);

  std::ostringstream cfg_line;
  cfg_line << "dim=" << opts.testbed.dim << " clients=" << opts.testbed.n_clients
           << " eig_min=" << format_number(opts.testbed.eig_min)
           << " eig_max=" << format_number(opts.testbed.eig_max)
           << " b_scale=" << format_number(opts.testbed.b_scale)
           << " testbed_seed=" << opts.testbed.seed
           << " eta=" << format_number(opts.base.learning_rate) << " noise="
           << (opts.base.channel.noise_enabled
                   ? "sas(alpha=" + format_number(opts.base.channel.noise.alpha) +
                         ",tau=" + format_number(opts.base.channel.noise.tau) + ")"
                   : std::string("off"))
           << " fading="
           << (opts.base.channel.noise_enabled ? opts.base.channel.fading.to_string() : "none")
           << " seed=" << opts.base.seed << " k_grid=";
  for (std::size_t i = 0; i < opts.k_grid.size(); ++i) {
    cfg_line << (i ? "," : "") << opts.k_grid[i];
  }
  cfg_line << " seeds=" << opts.n_seeds << " measure_pc=" << (opts.measure_p_c ? 1 : 0)
           << " L=" << format_number(rep.lipschitz) << " G=" << format_number(rep.grad_bound)
           << " C=" << format_number(rep.clip) << " radius=" << format_number(rep.domain_radius)
           << " f0=" << format_number(rep.f0) << " f_star=" << format_number(rep.f_star)
           << " p_c=" << format_number(rep.p_c);

  CsvWriter csv(opts.output, "theorem1", cfg_line.str(),
                {"K", "empirical_avg_grad_sq", "bound_rhs", "margin_ratio", "eta", "transient",
                 "residual", "row_kind"});
  auto emit = [&](const Theorem1Row& r, const char* kind) {
    csv.row({std::to_string(r.rounds), format_number(r.empirical_avg_grad_sq),
             format_number(r.bound_rhs), format_number(r.margin_ratio), format_number(r.eta),
             format_number(r.transient), format_number(r.residual),
             r.classical ? "classical" : kind});
  };
  for (const auto& r : rep.k_rows) {
    emit(r, "k_sweep");
    log << "K=" << r.rounds << ": empirical " << format_number(r.empirical_avg_grad_sq)
        << " bound " << format_number(r.bound_rhs) << " ratio " << format_number(r.margin_ratio)
        << '\n';
  }
  for (const auto& r : rep.eta_rows) emit(r, "eta_sweep");
  csv.close();
}

}  // namespace otafl
