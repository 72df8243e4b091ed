#include "arcvar/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>

#include "arcvar/error.hpp"

namespace arcvar {

namespace {

constexpr std::uint64_t kReplicationStream = 0x7265706c;  // "repl"
constexpr std::uint64_t kTargetStream = 0x74617267;       // "targ"

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct Replication {
  bool ok = false;
  std::vector<double> feasible;
  std::vector<double> oracle;
};

Replication run_replication(const ARModel& model, const InnovationScenario& scenario, std::size_t n,
                            std::span<const double> alphas, std::uint64_t seed, const HarnessOptions& opts) {
  Replication out;
  try {
    const std::size_t p = model.order();
    const Series series = simulate_ar(model, scenario.sampler(), n + p, opts.burn_in, seed);
    const LaggedDesign design = build_lagged_design(series, p, false);

    const InnovationRisk feasible = estimate_innovation_risk(design, alphas, opts.risk);
    const std::vector<double> oracle_residuals = residuals(design, model.phi(), model.intercept());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      out.feasible.push_back(feasible.reports[a].cvar_hat);
      out.oracle.push_back(cvar_min_form(oracle_residuals, alphas[a]).cvar_hat);
    }
    out.ok = true;
  } catch (const DataError&) {
  } catch (const NumericalError&) {
  }
  return out;
}

struct ErrorStats {
  double bias = 0.0;
  double rmse = 0.0;
  double se_bias = 0.0;
  double se_rmse = 0.0;
};

// Fixed summation order (replication index) keeps results bitwise stable.
ErrorStats summarize(const std::vector<double>& estimates, double target) {
  ErrorStats s;
  const double m = static_cast<double>(estimates.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : estimates) {
    sum += e - target;
    sum_sq += (e - target) * (e - target);
  }
  s.bias = sum / m;
  const double mse = sum_sq / m;
  s.rmse = std::sqrt(mse);
  if (estimates.size() > 1) {
    double var_err = 0.0;
    double var_sq = 0.0;
    for (double e : estimates) {
      const double d = e - target;
      var_err += (d - s.bias) * (d - s.bias);
      var_sq += (d * d - mse) * (d * d - mse);
    }
    var_err /= (m - 1.0);
    var_sq /= (m - 1.0);
    s.se_bias = std::sqrt(var_err / m);
    s.se_rmse = s.rmse > 0.0 ? std::sqrt(var_sq / m) / (2.0 * s.rmse) : 0.0;
  }
  return s;
}

std::vector<CellResult> run_group(const ARModel& model, const InnovationScenario& scenario, std::size_t n,
                                  std::span<const double> alphas, std::span<const TargetValue> targets,
                                  std::size_t replications, std::uint64_t master_seed, const HarnessOptions& opts) {
  std::vector<Replication> reps(replications);
  parallel_for(replications, opts.threads, [&](std::size_t r) {
    reps[r] = run_replication(model, scenario, n, alphas, replication_seed(master_seed, scenario, n, r), opts);
  });

  std::vector<CellResult> cells;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    CellResult cell;
    cell.model = model.label();
    cell.scenario = std::string(scenario.name());
    cell.n = n;
    cell.alpha = alphas[a];
    cell.target = targets[a].value;
    cell.target_se = targets[a].std_error;

    std::vector<double> feasible;
    std::vector<double> oracle;
    for (const Replication& rep : reps) {
      if (!rep.ok) continue;
      feasible.push_back(rep.feasible[a]);
      oracle.push_back(rep.oracle[a]);
    }
    cell.replications_used = feasible.size();
    cell.failures = replications - feasible.size();
    const double allowed = opts.max_failure_fraction * static_cast<double>(replications);
    if (feasible.empty() || static_cast<double>(cell.failures) > allowed) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.bias_r = cell.rmse_r = cell.bias_oracle = cell.rmse_oracle = nan;
      cell.error = "cell aborted: " + std::to_string(cell.failures) + " of " + std::to_string(replications) +
                   " replications failed";
    } else {
      const ErrorStats fs = summarize(feasible, cell.target);
      const ErrorStats os = summarize(oracle, cell.target);
      cell.bias_r = fs.bias;
      cell.rmse_r = fs.rmse;
      cell.se_bias_r = fs.se_bias;
      cell.se_rmse_r = fs.se_rmse;
      cell.bias_oracle = os.bias;
      cell.rmse_oracle = os.rmse;
      cell.se_bias_oracle = os.se_bias;
      cell.se_rmse_oracle = os.se_rmse;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

CellResult failed_cell(const ARModel& model, const InnovationScenario& scenario, std::size_t n, double alpha,
                       std::size_t replications, const std::string& what) {
  CellResult cell;
  cell.model = model.label();
  cell.scenario = std::string(scenario.name());
  cell.n = n;
  cell.alpha = alpha;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  cell.bias_r = cell.rmse_r = cell.bias_oracle = cell.rmse_oracle = cell.target = nan;
  cell.failures = replications;
  cell.error = what;
  return cell;
}

}  // namespace

ExperimentGrid ExperimentGrid::standard(std::size_t replications, std::uint64_t master_seed) {
  ExperimentGrid grid;
  grid.models = {ARModel::require_stationary({0.5}), ARModel::require_stationary({0.8}),
                 ARModel::require_stationary({0.5, -0.2})};
  grid.sizes = {100, 200, 500};
  grid.alphas = {0.95, 0.99};
  grid.scenarios = {InnovationScenario::contamination(), InnovationScenario::mixture(), InnovationScenario::normal(),
                    InnovationScenario::t3()};
  grid.replications = replications;
  grid.master_seed = master_seed;
  return grid;
}

std::uint64_t replication_seed(std::uint64_t master_seed, const InnovationScenario& scenario, std::size_t n,
                               std::size_t rep) {
  return derive_seed(master_seed, {kReplicationStream, static_cast<std::uint64_t>(scenario.tag()),
                                   static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

std::uint64_t target_seed(std::uint64_t master_seed, const InnovationScenario& scenario, double alpha) {
  return derive_seed(master_seed,
                     {kTargetStream, static_cast<std::uint64_t>(scenario.tag()), std::bit_cast<std::uint64_t>(alpha)});
}

CellResult run_cell(const ARModel& model, const InnovationScenario& scenario, std::size_t n, double alpha,
                    std::size_t replications, std::uint64_t master_seed, const HarnessOptions& opts) {
  if (replications < 1) throw std::invalid_argument("a cell needs at least one replication");
  if (!check_stationary(model).stationary) throw DataError(model.label() + " is not stationary");
  const TargetValue target =
      cvar_target(scenario, alpha, opts.target_mc_size, target_seed(master_seed, scenario, alpha), opts.target_method);
  const double alphas[] = {alpha};
  const TargetValue targets[] = {target};
  return run_group(model, scenario, n, alphas, targets, replications, master_seed, opts).front();
}

std::vector<CellResult> run_grid(const ExperimentGrid& grid) {
  const HarnessOptions& opts = grid.options;

  // Targets depend only on (scenario, alpha).
  std::map<std::pair<int, double>, TargetValue> targets;
  std::map<std::pair<int, double>, std::string> target_errors;
  for (const auto& scenario : grid.scenarios) {
    for (double alpha : grid.alphas) {
      const auto key = std::make_pair(static_cast<int>(scenario.tag()), alpha);
      try {
        targets[key] = cvar_target(scenario, alpha, opts.target_mc_size, target_seed(grid.master_seed, scenario, alpha),
                                   opts.target_method);
      } catch (const std::exception& e) {
        target_errors[key] = std::string("target failed: ") + e.what();
      }
    }
  }

  // groups[model][scenario][size] holds one CellResult per alpha.
  std::vector<std::vector<std::vector<std::vector<CellResult>>>> groups(grid.models.size());
  for (std::size_t m = 0; m < grid.models.size(); ++m) {
    const ARModel& model = grid.models[m];
    groups[m].resize(grid.scenarios.size());
    for (std::size_t s = 0; s < grid.scenarios.size(); ++s) {
      const InnovationScenario& scenario = grid.scenarios[s];
      for (std::size_t n : grid.sizes) {
        std::vector<double> ok_alphas;
        std::vector<TargetValue> ok_targets;
        for (double alpha : grid.alphas) {
          const auto key = std::make_pair(static_cast<int>(scenario.tag()), alpha);
          if (auto it = targets.find(key); it != targets.end()) {
            ok_alphas.push_back(alpha);
            ok_targets.push_back(it->second);
          }
        }
        std::vector<CellResult> computed;
        std::string group_error;
        try {
          if (grid.replications < 1) throw std::invalid_argument("a cell needs at least one replication");
          if (!check_stationary(model).stationary) throw DataError(model.label() + " is not stationary");
          computed = run_group(model, scenario, n, ok_alphas, ok_targets, grid.replications, grid.master_seed, opts);
        } catch (const std::exception& e) {
          group_error = e.what();
        }
        std::vector<CellResult> per_alpha;
        for (double alpha : grid.alphas) {
          const auto key = std::make_pair(static_cast<int>(scenario.tag()), alpha);
          if (auto it = target_errors.find(key); it != target_errors.end()) {
            per_alpha.push_back(failed_cell(model, scenario, n, alpha, grid.replications, it->second));
            continue;
          }
          if (!group_error.empty()) {
            per_alpha.push_back(failed_cell(model, scenario, n, alpha, grid.replications, group_error));
            continue;
          }
          for (const auto& cell : computed) {
            if (cell.alpha == alpha) per_alpha.push_back(cell);
          }
        }
        groups[m][s].push_back(std::move(per_alpha));
      }
    }
  }

  std::vector<CellResult> out;
  out.reserve(grid.cell_count());
  for (std::size_t m = 0; m < grid.models.size(); ++m) {
    for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
      for (std::size_t s = 0; s < grid.scenarios.size(); ++s) {
        for (std::size_t k = 0; k < grid.sizes.size(); ++k) out.push_back(groups[m][s][k][a]);
      }
    }
  }
  return out;
}

namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_cells_csv(std::ostream& os, std::span<const CellResult> cells) {
  os << "model,n,scenario,alpha,bias_r,rmse_r,bias_oracle,rmse_oracle,target,R_used,failures\n";
  for (const CellResult& c : cells) {
    os << quoted(c.model) << ',' << c.n << ',' << c.scenario << ',' << fixed(c.alpha, 2) << ','
       << fixed(c.bias_r, 6) << ',' << fixed(c.rmse_r, 6) << ',' << fixed(c.bias_oracle, 6) << ','
       << fixed(c.rmse_oracle, 6) << ',' << fixed(c.target, 6) << ',' << c.replications_used << ',' << c.failures
       << '\n';
  }
}

void write_cells_text(std::ostream& os, std::span<const CellResult> cells) {
  std::vector<std::string> models;
  for (const CellResult& c : cells) {
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
  }
  char line[256];
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (m) os << '\n';
    os << models[m] << ": bias and RMSE of CVaR from raw residuals, R-fit vs oracle\n";
    std::snprintf(line, sizeof line, "%-5s %-14s %-5s %10s %10s %13s %13s\n", "n", "scenario", "alpha", "bias (R)",
                  "RMSE (R)", "bias (Oracle)", "RMSE (Oracle)");
    os << line;
    for (const CellResult& c : cells) {
      if (c.model != models[m]) continue;
      std::snprintf(line, sizeof line, "%-5zu %-14s %-5s %10s %10s %13s %13s", c.n, c.scenario.c_str(),
                    fixed(c.alpha, 2).c_str(), fixed(c.bias_r, 4).c_str(), fixed(c.rmse_r, 4).c_str(),
                    fixed(c.bias_oracle, 4).c_str(), fixed(c.rmse_oracle, 4).c_str());
      os << line;
      if (c.error) os << "  [" << *c.error << ']';
      os << '\n';
    }
  }
}

}  // namespace arcvar
