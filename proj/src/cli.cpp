#include "arcvar/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "arcvar/ar_model.hpp"
#include "arcvar/error.hpp"
#include "arcvar/ingest.hpp"
#include "arcvar/quantile_regression.hpp"
#include "arcvar/rank_estimator.hpp"
#include "arcvar/report_json.hpp"
#include "arcvar/risk.hpp"
#include "arcvar/scenario.hpp"
#include "arcvar/sim_harness.hpp"

namespace arcvar {

namespace fs = std::filesystem;

namespace {

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_level(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

RSolver parse_solver(const std::string& name) {
  if (name == "exact_lp") return RSolver::exact_lp;
  if (name == "coordinate_search") return RSolver::coordinate_search;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

TargetMethod parse_target_method(const std::string& name) {
  if (name == "automatic") return TargetMethod::automatic;
  if (name == "analytic") return TargetMethod::analytic;
  if (name == "stratified_mc") return TargetMethod::stratified_mc;
  if (name == "iid_mc") return TargetMethod::iid_mc;
  throw std::invalid_argument("unknown target method '" + name + "'");
}

struct Globals {
  std::uint64_t seed = kDefaultMasterSeed;
  std::string config;
  std::string out_dir = ".";
  std::string format;

  std::string format_or(std::string_view fallback) const { return format.empty() ? std::string(fallback) : format; }
};

struct SimulateArgs {
  std::vector<double> phi;
  std::optional<double> intercept;
  std::size_t n = 500;
  std::size_t burn_in = kDefaultBurnIn;
  std::string scenario = "normal";
  std::string output;
};

struct FitArgs {
  std::string input;
  std::string column;
  std::size_t p = 1;
  std::string method = "r";
  double lambda = kDefaultLambda;
  double alpha = 0.5;
  std::string solver = "exact_lp";
  std::string output;
};

struct RiskArgs {
  std::string input;
  std::string column;
  std::vector<double> alphas{0.95, 0.99};
  std::size_t p = 0;
  double lambda = kDefaultLambda;
  std::string solver = "exact_lp";
  std::string output;
};

struct BenchArgs {
  std::string grid = "standard";
  std::size_t replications = 1000;
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::vector<std::string> scenarios;
  unsigned threads = 0;
  std::size_t burn_in = kDefaultBurnIn;
  std::size_t target_mc_size = 10'000'000;
  std::string target_method = "automatic";
};

struct AnalyzeArgs {
  std::string input;
  std::string date_column = "date";
  std::string value_column = "value";
  std::string date_format = "%Y-%m-%d";
  std::string delimiter = ",";
  std::string gauge;
  std::size_t p = 1;
  double lambda = kDefaultLambda;
  std::vector<double> alphas{0.95, 0.99};
  double flag_level = 0.99;
  std::string solver = "exact_lp";
};

struct Settings {
  Globals global;
  SimulateArgs simulate;
  FitArgs fit;
  RiskArgs risk;
  BenchArgs bench;
  AnalyzeArgs analyze;
};

std::unique_ptr<CLI::App> build_app(Settings& s) {
  auto app = std::make_unique<CLI::App>("Tail risk of autoregressive innovations", "arcvar");
  app->fallthrough();
  app->require_subcommand(1);
  app->add_option("--seed", s.global.seed, "Master seed for every stochastic step")->capture_default_str();
  app->add_option("--config", s.global.config, "Flat key=value file supplying option defaults");
  app->add_option("--out-dir", s.global.out_dir, "Directory for written artifacts")->capture_default_str();
  app->add_option("--format", s.global.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));

  const std::vector<std::string> solvers{"exact_lp", "coordinate_search"};

  auto* sim = app->add_subcommand("simulate", "Simulate an AR(p) series");
  sim->add_option("--phi", s.simulate.phi, "Slopes, comma separated")->required()->delimiter(',');
  sim->add_option("--intercept", s.simulate.intercept, "Optional intercept");
  sim->add_option("--n", s.simulate.n, "Retained length")->capture_default_str();
  sim->add_option("--burn-in", s.simulate.burn_in, "Discarded initial steps")->capture_default_str();
  sim->add_option("--scenario", s.simulate.scenario, "normal, t3, mixture or contamination")->capture_default_str();
  sim->add_option("--output", s.simulate.output, "Output file (default <out-dir>/series.<ext>)");

  auto* fit = app->add_subcommand("fit", "Fit autoregression slopes");
  fit->add_option("--input", s.fit.input, "Series CSV")->required();
  fit->add_option("--column", s.fit.column, "Value column");
  fit->add_option("--p", s.fit.p, "Autoregressive order")->capture_default_str();
  fit->add_option("--method", s.fit.method, "r (rank) or arq (autoregression quantile)")
      ->check(CLI::IsMember({"r", "arq"}))
      ->capture_default_str();
  fit->add_option("--lambda", s.fit.lambda, "Step score level")->capture_default_str();
  fit->add_option("--alpha", s.fit.alpha, "Quantile level for arq")->capture_default_str();
  fit->add_option("--solver", s.fit.solver, "R-estimator solver")->check(CLI::IsMember(solvers))->capture_default_str();
  fit->add_option("--output", s.fit.output, "Also write the report here");

  auto* risk = app->add_subcommand("risk", "VaR and CVaR of a sample or of AR residuals");
  risk->add_option("--input", s.risk.input, "Series or residual CSV")->required();
  risk->add_option("--column", s.risk.column, "Value column");
  risk->add_option("--alpha", s.risk.alphas, "Levels, comma separated")->delimiter(',')->capture_default_str();
  risk->add_option("--p", s.risk.p, "AR order; 0 treats the input as the residual sample")->capture_default_str();
  risk->add_option("--lambda", s.risk.lambda, "Step score level")->capture_default_str();
  risk->add_option("--solver", s.risk.solver, "R-estimator solver")->check(CLI::IsMember(solvers))->capture_default_str();
  risk->add_option("--output", s.risk.output, "Also write the report here");

  auto* bench = app->add_subcommand("bench", "Monte Carlo bias/RMSE benchmark");
  // "paper" is an alias of "standard" kept for existing scripts.
  bench->add_option("--grid", s.bench.grid, "Grid preset")
      ->check(CLI::IsMember({"standard", "paper"}))
      ->capture_default_str();
  bench->add_option("--replications", s.bench.replications, "Replications per cell")->capture_default_str();
  bench->add_option("--sizes", s.bench.sizes, "Restrict sample sizes")->delimiter(',');
  bench->add_option("--alphas", s.bench.alphas, "Restrict levels")->delimiter(',');
  bench->add_option("--scenarios", s.bench.scenarios, "Restrict innovation laws")->delimiter(',');
  bench->add_option("--threads", s.bench.threads, "Worker threads, 0 for all cores")->capture_default_str();
  bench->add_option("--burn-in", s.bench.burn_in, "Discarded initial steps")->capture_default_str();
  bench->add_option("--target-mc-size", s.bench.target_mc_size, "Draws per Monte Carlo target")->capture_default_str();
  bench->add_option("--target-method", s.bench.target_method, "Target evaluation")
      ->check(CLI::IsMember({"automatic", "analytic", "stratified_mc", "iid_mc"}))
      ->capture_default_str();

  auto* an = app->add_subcommand("analyze", "Tail-risk analysis of a daily gauge series");
  an->add_option("--input", s.analyze.input, "Daily CSV")->required();
  an->add_option("--date-column", s.analyze.date_column, "Date column")->capture_default_str();
  an->add_option("--value-column", s.analyze.value_column, "Discharge column")->capture_default_str();
  an->add_option("--date-format", s.analyze.date_format, "strftime date format")->capture_default_str();
  an->add_option("--delimiter", s.analyze.delimiter, "Field delimiter")->capture_default_str();
  an->add_option("--gauge", s.analyze.gauge, "Gauge label (default: input file stem)");
  an->add_option("--p", s.analyze.p, "Autoregressive order")->capture_default_str();
  an->add_option("--lambda", s.analyze.lambda, "Step score level")->capture_default_str();
  an->add_option("--alpha", s.analyze.alphas, "Levels, comma separated")->delimiter(',')->capture_default_str();
  an->add_option("--flag-level", s.analyze.flag_level, "VaR level for exceedance flags")->capture_default_str();
  an->add_option("--solver", s.analyze.solver, "R-estimator solver")->check(CLI::IsMember(solvers))->capture_default_str();
  return app;
}

bool mentions_option(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Config keys become --key=value arguments unless the command line already
// sets them. Keys of other subcommands are ignored; unknown keys are rejected.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  const std::optional<std::string> path = config_path(args);
  if (!path) return args;

  CLI::App* chosen = nullptr;
  for (const std::string& a : args) {
    if (CLI::App* sub = app.get_subcommand_no_throw(a)) {
      chosen = sub;
      break;
    }
  }

  std::vector<std::string> front;
  std::vector<std::string> back;
  for (auto [key, value] : parse_config_file(*path)) {
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    if (key == "config") throw std::invalid_argument("config files cannot include other config files");
    if (mentions_option(args, flag)) continue;
    const std::string arg = flag + "=" + value;
    if (app.get_option_no_throw(flag) != nullptr) {
      front.push_back(arg);
      continue;
    }
    if (chosen != nullptr && chosen->get_option_no_throw(flag) != nullptr) {
      back.push_back(arg);
      continue;
    }
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool elsewhere = std::any_of(subs.begin(), subs.end(),
                                       [&](CLI::App* sub) { return sub->get_option_no_throw(flag) != nullptr; });
    if (!elsewhere) throw std::invalid_argument(*path + ": unknown config key '" + key + "'");
  }
  front.insert(front.end(), args.begin(), args.end());
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

fs::path output_path(const Globals& g, const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(g.out_dir) / default_name;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::string risk_csv(std::span<const RiskReport> reports) {
  std::ostringstream os;
  os << "alpha,var_hat,cvar_hat,n_eff,xi_star\n";
  for (const RiskReport& r : reports) {
    os << fmt17(r.alpha) << ',' << fmt17(r.var_hat) << ',' << fmt17(r.cvar_hat) << ',' << r.n_eff << ','
       << fmt17(r.xi_star) << '\n';
  }
  return os.str();
}

std::string risk_text(std::span<const RiskReport> reports) {
  std::ostringstream os;
  for (const RiskReport& r : reports) {
    os << "alpha=" << fmt_level(r.alpha) << "  VaR=" << fmt6(r.var_hat) << "  CVaR=" << fmt6(r.cvar_hat)
       << "  n_eff=" << r.n_eff << '\n';
  }
  return os.str();
}

int run_simulate(const Settings& s, std::ostream& out) {
  const SimulateArgs& a = s.simulate;
  // --phi is user input, so a non-stationary model is a usage error here.
  const ARModel model(a.phi, a.intercept);
  if (const Stationarity st = check_stationary(model); !st.stationary) {
    throw std::invalid_argument("--phi: " + model.label() + " is not stationary (largest root modulus " +
                                fmt6(st.max_modulus) + ")");
  }
  const InnovationScenario scenario = InnovationScenario::from_name(a.scenario);
  auto draw = scenario.sampler();
  const Series series = simulate_ar(model, draw, a.n, a.burn_in, s.global.seed);

  const std::string format = s.global.format_or("csv");
  std::ostringstream os;
  std::string ext = "csv";
  if (format == "json") {
    ext = "json";
    Json doc{{"metadata", metadata_json(s.global.seed)},
             {"model", model.label()},
             {"scenario", scenario.name()},
             {"burn_in", a.burn_in},
             {"values", std::vector<double>(series.values().begin(), series.values().end())}};
    os << doc.dump(2) << '\n';
  } else if (format == "text") {
    ext = "txt";
    for (double v : series.values()) os << fmt17(v) << '\n';
  } else {
    os << "t,value\n";
    for (std::size_t t = 0; t < series.size(); ++t) os << t + 1 << ',' << fmt17(series[t]) << '\n';
  }
  const fs::path path = output_path(s.global, a.output, "series." + ext);
  ensure_parent(path);
  write_file_atomic(path, os.str());
  out << "wrote " << path.string() << " (" << series.size() << " values, " << model.label() << ", "
      << scenario.name() << ")\n";
  return 0;
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  out << text;
  if (!output.empty()) {
    const fs::path path(output);
    ensure_parent(path);
    write_file_atomic(path, text);
  }
}

int run_fit(const Settings& s, std::ostream& out) {
  const FitArgs& a = s.fit;
  if (a.p < 1) throw std::invalid_argument("--p must be at least 1");
  const Series series = read_series_csv(a.input, a.column);
  const std::string format = s.global.format_or("json");
  std::ostringstream os;

  if (a.method == "r") {
    const LaggedDesign design = build_lagged_design(series, a.p, false);
    RSolverOptions opts;
    opts.method = parse_solver(a.solver);
    const RFit fit = fit_r_estimator(design, ScoreFn(a.lambda), opts);
    if (format == "json") {
      os << fit_report_json(series.label(), design.rows(), fit).dump(2) << '\n';
    } else if (format == "csv") {
      os << "term,estimate\n";
      for (std::size_t j = 0; j < fit.slopes.size(); ++j) os << "phi" << j + 1 << ',' << fmt17(fit.slopes[j]) << '\n';
    } else {
      os << "R-estimate (lambda=" << fmt_level(fit.lambda) << ", n_eff=" << design.rows() << ")\n";
      for (std::size_t j = 0; j < fit.slopes.size(); ++j) os << "  phi" << j + 1 << " = " << fmt6(fit.slopes[j]) << '\n';
      os << "  dispersion = " << fmt6(fit.dispersion_at_min) << '\n';
    }
  } else {
    const LaggedDesign design = build_lagged_design(series, a.p, true);
    const ARQuantile fit = fit_ar_quantile(design, a.alpha);
    if (format == "json") {
      os << fit_report_json(series.label(), design.rows(), fit).dump(2) << '\n';
    } else if (format == "csv") {
      os << "term,estimate\n";
      for (std::size_t j = 0; j < fit.coeffs.size(); ++j) os << "phi" << j << ',' << fmt17(fit.coeffs[j]) << '\n';
    } else {
      os << "autoregression quantile (alpha=" << fmt_level(fit.alpha) << ", n_eff=" << design.rows() << ")\n";
      for (std::size_t j = 0; j < fit.coeffs.size(); ++j) os << "  phi" << j << " = " << fmt6(fit.coeffs[j]) << '\n';
      os << "  objective = " << fmt6(fit.objective) << '\n';
    }
  }
  emit(os.str(), a.output, out);
  return 0;
}

int run_risk(const Settings& s, std::ostream& out) {
  const RiskArgs& a = s.risk;
  if (a.alphas.empty()) throw std::invalid_argument("--alpha needs at least one level");
  const Series series = read_series_csv(a.input, a.column);
  std::vector<RiskReport> reports;
  std::optional<RFit> fit;
  if (a.p == 0) {
    for (double alpha : a.alphas) reports.push_back(cvar_min_form(series.values(), alpha));
  } else {
    RiskOptions opts;
    opts.lambda = a.lambda;
    opts.solver.method = parse_solver(a.solver);
    InnovationRisk risk = estimate_innovation_risk(series, a.p, a.alphas, opts);
    reports = std::move(risk.reports);
    fit = std::move(risk.fit);
  }

  const std::string format = s.global.format_or("json");
  std::string text;
  if (format == "json") {
    text = risk_report_json(series.label(), a.p, series.size(), reports, fit ? &*fit : nullptr).dump(2) + "\n";
  } else if (format == "csv") {
    text = risk_csv(reports);
  } else {
    text = risk_text(reports);
  }
  emit(text, a.output, out);
  return 0;
}

int run_bench(const Settings& s, std::ostream& out, std::ostream& err) {
  const BenchArgs& a = s.bench;
  ExperimentGrid grid = ExperimentGrid::standard(a.replications, s.global.seed);
  if (!a.sizes.empty()) grid.sizes = a.sizes;
  if (!a.alphas.empty()) grid.alphas = a.alphas;
  if (!a.scenarios.empty()) {
    grid.scenarios.clear();
    for (const std::string& name : a.scenarios) grid.scenarios.push_back(InnovationScenario::from_name(name));
  }
  if (grid.replications < 1) throw std::invalid_argument("--replications must be at least 1");
  grid.options.threads = a.threads;
  grid.options.burn_in = a.burn_in;
  grid.options.target_mc_size = a.target_mc_size;
  grid.options.target_method = parse_target_method(a.target_method);

  const auto start = std::chrono::steady_clock::now();
  const std::vector<CellResult> cells = run_grid(grid);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  write_cells_csv(csv, cells);
  std::ostringstream txt;
  write_cells_text(txt, cells);

  std::size_t failures = 0;
  std::size_t aborted = 0;
  Json targets = Json::array();
  std::map<std::pair<std::string, double>, bool> seen;
  for (const CellResult& c : cells) {
    failures += c.failures;
    if (c.error) {
      ++aborted;
      err << "warning: cell " << c.model << " / " << c.scenario << " / n=" << c.n << " / alpha=" << c.alpha
          << " aborted: " << *c.error << '\n';
    }
    if (!seen.emplace(std::make_pair(c.scenario, c.alpha), true).second) continue;
    targets.push_back({{"scenario", c.scenario}, {"alpha", c.alpha}, {"value", c.target}, {"std_error", c.target_se}});
  }
  Json meta{{"schema", "arcvar.bench_meta"},
            {"schema_version", kSchemaVersion},
            {"metadata", metadata_json(s.global.seed)},
            {"grid", a.grid},
            {"replications", grid.replications},
            {"burn_in", grid.options.burn_in},
            {"target_mc_size", grid.options.target_mc_size},
            {"target_method", a.target_method},
            {"cells", cells.size()},
            {"failed_replications", failures},
            {"aborted_cells", aborted},
            {"targets", targets},
            {"elapsed_seconds", elapsed}};

  const fs::path dir(s.global.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "bench.csv", csv.str());
  write_file_atomic(dir / "bench.txt", txt.str());
  write_file_atomic(dir / "bench_meta.json", meta.dump(2) + "\n");

  const std::string format = s.global.format_or("text");
  if (format == "csv") {
    out << csv.str();
  } else if (format == "json") {
    out << meta.dump(2) << '\n';
  } else {
    out << txt.str();
  }
  return 0;
}

int run_analyze(const Settings& s, std::ostream& out, std::ostream& err) {
  const AnalyzeArgs& a = s.analyze;
  if (a.delimiter.size() != 1) throw std::invalid_argument("--delimiter must be a single character");
  const DailyCsv data = parse_daily_csv(a.input, a.date_column, a.value_column, a.date_format, a.delimiter[0]);
  if (data.missing_values > 0) {
    err << "warning: " << data.missing_values << " missing or unparseable values treated as gaps\n";
  }

  AnalysisOptions opts;
  opts.p = a.p;
  opts.lambda = a.lambda;
  opts.alphas = a.alphas;
  opts.flag_level = a.flag_level;
  opts.gauge = a.gauge.empty() ? fs::path(a.input).stem().string() : a.gauge;
  opts.solver.method = parse_solver(a.solver);
  const AnalysisReport report = analyze(data.records, opts);

  const Json doc = analysis_report_json(report);
  std::ostringstream exc;
  exc << "date,residual,value\n";
  for (const Exceedance& e : report.exceedances) {
    exc << format_date(e.date) << ',' << fmt17(e.residual) << ',' << fmt17(e.value) << '\n';
  }
  const fs::path dir(s.global.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "analysis_report.json", doc.dump(2) + "\n");
  write_file_atomic(dir / "exceedances.csv", exc.str());

  const std::string format = s.global.format_or("json");
  if (format == "json") {
    out << doc.dump(2) << '\n';
  } else if (format == "csv") {
    out << exc.str();
  } else {
    out << report.gauge << "  " << format_date(report.period_start) << " .. " << format_date(report.period_end)
        << "  n_eff=" << report.n_eff << "  segments=" << report.segments_used << '\n';
    for (std::size_t j = 0; j < report.phi_hat.size(); ++j) out << "  phi" << j + 1 << " = " << fmt6(report.phi_hat[j]) << '\n';
    out << risk_text(report.risk);
    out << "  VaR_" << fmt_level(report.flag_level) << " = " << fmt6(report.var_flag) << ", "
        << report.exceedances.size() << " exceedance dates\n";
  }
  return 0;
}

int fail(std::ostream& err, ExitCode code, std::string_view message) {
  const int value = static_cast<int>(code);
  err << "ERROR[" << value << "]: " << message << '\n';
  return value;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim_copy(std::string_view(t).substr(0, eq));
    std::string value = trim_copy(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings settings;
  std::unique_ptr<CLI::App> app = build_app(settings);
  try {
    std::vector<std::string> argv = apply_config(*app, args);
    std::reverse(argv.begin(), argv.end());
    app->parse(std::move(argv));
  } catch (const CLI::Success& e) {
    return app->exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(err, ExitCode::usage, std::string(e.what()) + " (run with --help for usage)");
  } catch (const std::invalid_argument& e) {
    return fail(err, ExitCode::usage, e.what());
  } catch (const std::exception& e) {
    return fail(err, ExitCode::data, e.what());
  }

  try {
    if (app->got_subcommand("simulate")) return run_simulate(settings, out);
    if (app->got_subcommand("fit")) return run_fit(settings, out);
    if (app->got_subcommand("risk")) return run_risk(settings, out);
    if (app->got_subcommand("bench")) return run_bench(settings, out, err);
    if (app->got_subcommand("analyze")) return run_analyze(settings, out, err);
    return fail(err, ExitCode::usage, "no subcommand given");
  } catch (const std::invalid_argument& e) {
    return fail(err, ExitCode::usage, e.what());
  } catch (const DataError& e) {
    return fail(err, ExitCode::data, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(err, ExitCode::data, e.what());
  } catch (const NumericalError& e) {
    return fail(err, ExitCode::numerical, e.what());
  } catch (const std::exception& e) {
    return fail(err, ExitCode::numerical, e.what());
  }
}

}  // namespace arcvar
