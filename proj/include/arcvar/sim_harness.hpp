#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcvar/ar_model.hpp"
#include "arcvar/risk.hpp"
#include "arcvar/scenario.hpp"

namespace arcvar {

inline constexpr std::uint64_t kDefaultMasterSeed = 20240917;

struct HarnessOptions {
  std::size_t burn_in = kDefaultBurnIn;
  std::size_t target_mc_size = 10'000'000;
  TargetMethod target_method = TargetMethod::automatic;
  unsigned threads = 0;  // 0: hardware concurrency
  double max_failure_fraction = 0.01;
  RiskOptions risk;
};

/// Feasible-vs-oracle bias and RMSE of the CVaR plug-in estimator for one
/// (model, scenario, n, alpha) cell.
struct CellResult {
  std::string model;
  std::string scenario;
  std::size_t n = 0;
  double alpha = 0.0;
  double bias_r = 0.0;
  double rmse_r = 0.0;
  double bias_oracle = 0.0;
  double rmse_oracle = 0.0;
  double se_bias_r = 0.0;  // replication standard errors
  double se_rmse_r = 0.0;
  double se_bias_oracle = 0.0;
  double se_rmse_oracle = 0.0;
  double target = 0.0;
  double target_se = 0.0;
  std::size_t replications_used = 0;
  std::size_t failures = 0;
  std::optional<std::string> error;  // set when the cell aborted
};

struct ExperimentGrid {
  std::vector<ARModel> models;
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::vector<InnovationScenario> scenarios;
  std::size_t replications = 1000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  HarnessOptions options;

  /// AR(1) 0.5, AR(1) 0.8, AR(2) (0.5, -0.2); n in {100, 200, 500};
  /// alpha in {0.95, 0.99}; all four innovation laws.
  static ExperimentGrid standard(std::size_t replications = 1000, std::uint64_t master_seed = kDefaultMasterSeed);

  std::size_t cell_count() const noexcept {
    return models.size() * sizes.size() * alphas.size() * scenarios.size();
  }
};

/// Seed of replication `rep`. The model and alpha are deliberately absent, so
/// all models and levels see common innovations for a given (scenario, n).
std::uint64_t replication_seed(std::uint64_t master_seed, const InnovationScenario& scenario, std::size_t n,
                               std::size_t rep);

std::uint64_t target_seed(std::uint64_t master_seed, const InnovationScenario& scenario, double alpha);

/// Each replication simulates n + p values after burn-in, so both the feasible
/// and the oracle estimator see exactly n residuals.
CellResult run_cell(const ARModel& model, const InnovationScenario& scenario, std::size_t n, double alpha,
                    std::size_t replications, std::uint64_t master_seed, const HarnessOptions& opts = {});

/// One CellResult per cell, ordered by model, then alpha, then scenario, then n.
/// Failures inside a cell are recorded on that cell; the grid always completes.
std::vector<CellResult> run_grid(const ExperimentGrid& grid);

/// Columns: model, n, scenario, alpha, bias_r, rmse_r, bias_oracle, rmse_oracle,
/// target, R_used, failures.
void write_cells_csv(std::ostream& os, std::span<const CellResult> cells);

/// One table per model with the columns n, scenario, alpha, bias (R), RMSE (R),
/// bias (Oracle), RMSE (Oracle).
void write_cells_text(std::ostream& os, std::span<const CellResult> cells);

}  // namespace arcvar
