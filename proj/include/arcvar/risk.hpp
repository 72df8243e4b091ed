#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "arcvar/ar_model.hpp"
#include "arcvar/rank_estimator.hpp"
#include "arcvar/scenario.hpp"

namespace arcvar {

enum class CvarMethod { minimization, tail_average };
std::string_view to_string(CvarMethod method) noexcept;

struct RiskReport {
  double alpha = 0.0;
  double var_hat = 0.0;
  double cvar_hat = 0.0;
  std::size_t n_eff = 0;
  CvarMethod method = CvarMethod::minimization;
  double xi_star = 0.0;  // minimising xi of the check-loss objective
};

/// k-th order statistic, k = max(1, floor(n * alpha)).
double var_hat(std::span<const double> sample, double alpha);

/// floor(n(1-alpha))^{-1} min_xi sum rho_alpha(z - xi) + mean(z). The minimum is
/// found exactly by evaluating the piecewise-linear objective at every sample
/// point with a sorted prefix-sum sweep.
///
/// Throws TailTooThinError when floor(n(1-alpha)) < 1.
RiskReport cvar_min_form(std::span<const double> sample, double alpha);

/// Mean of sample values strictly above var_hat(sample, alpha). Throws
/// TailTooThinError when nothing exceeds it.
double cvar_tail_average(std::span<const double> sample, double alpha);

enum class TargetMethod {
  automatic,      // analytic for Normal, stratified Monte Carlo otherwise
  analytic,       // Normal only
  stratified_mc,  // inverse-CDF draws, one per probability stratum
  iid_mc,         // plain i.i.d. draws
};
std::string_view to_string(TargetMethod method) noexcept;

struct TargetValue {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
  TargetMethod method = TargetMethod::analytic;
};

inline constexpr std::size_t kMinTargetDraws = 1'000'000;

/// True CVaR_alpha of the innovation law. Monte Carlo paths require
/// mc_size >= kMinTargetDraws; their standard error comes from ten independent
/// batches.
TargetValue cvar_target(const InnovationScenario& scenario, double alpha, std::size_t mc_size,
                        std::uint64_t seed, TargetMethod method = TargetMethod::automatic);

struct RiskOptions {
  double lambda = kDefaultLambda;
  bool center_residuals = false;
  RSolverOptions solver;
};

struct InnovationRisk {
  RFit fit;
  std::size_t n_eff = 0;
  std::vector<double> residuals;
  std::vector<RiskReport> reports;  // one per requested alpha, in order
};

/// Tail risk of unobserved innovations: R-fit of the slopes, raw residuals,
/// then var_hat and cvar_min_form per alpha. Requires series length > p + 10.
InnovationRisk estimate_innovation_risk(const Series& series, std::size_t p,
                                        std::span<const double> alphas,
                                        const RiskOptions& opts = {});

/// Same construction on an existing design (pooled segments, for instance).
InnovationRisk estimate_innovation_risk(const LaggedDesign& design, std::span<const double> alphas,
                                        const RiskOptions& opts = {});

}  // namespace arcvar
