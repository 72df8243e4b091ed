#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "arcvar/ar_model.hpp"
#include "arcvar/quantile_regression.hpp"

namespace arcvar {

inline constexpr double kDefaultLambda = 0.5;

/// Step score u -> lambda - 1[u < lambda].
class ScoreFn {
 public:
  explicit ScoreFn(double lambda = kDefaultLambda);

  double lambda() const noexcept { return lambda_; }

  /// Throws std::invalid_argument unless 0 < u < 1.
  double operator()(double u) const;

  /// Number of ranks i in 1..n with i / (n + 1) < lambda, i.e. those scored lambda - 1.
  std::size_t lower_count(std::size_t n) const noexcept;

  /// Mean of J(i / (n + 1)) over i = 1..n.
  double centering(std::size_t n) const noexcept;

 private:
  double lambda_;
};

double score_eval(const ScoreFn& score, double u);

/// 1-based ranks; ties broken by position. Throws DataError on non-finite input.
std::vector<std::size_t> ranks(std::span<const double> values);

/// sum_t r_t [J(R_t / (n + 1)) - centering(n)].
double jaeckel_dispersion(std::span<const double> residuals, const ScoreFn& score);

/// Dispersion of the residuals X_t - b^T Y_{t-1}. The design must not carry an
/// intercept column.
double jaeckel_dispersion(const LaggedDesign& design, std::span<const double> b, const ScoreFn& score);

enum class RSolver {
  /// Minimise through the equivalent intercept-augmented check-loss LP.
  exact_lp,
  /// Multi-start coordinate/pattern search on the dispersion itself.
  coordinate_search,
};

std::string_view to_string(RSolver method) noexcept;

struct RSolverOptions {
  RSolver method = RSolver::exact_lp;
  double f_tol = 1e-8;  // relative: the absolute tolerance is f_tol * (1 + |D|)
  double x_tol = 1e-6;  // relative to max(1, |b|_inf)
  int max_restarts = 4;
  double restart_spread = 0.2;
  int max_iterations = 200000;
  QuantRegOptions lp;
};

struct SolverTrace {
  int iterations = 0;
  int restarts = 0;
  /// Largest rate of decrease of D over coordinate probes of size x_tol; zero
  /// at a certified minimum.
  double subgradient_gap = 0.0;
};

struct RFit {
  std::vector<double> slopes;
  double dispersion_at_min = 0.0;
  double dispersion_at_start = 0.0;  // at the least-squares slopes
  SolverTrace trace;
  double lambda = kDefaultLambda;
  RSolver method = RSolver::exact_lp;
};

/// R-estimate of the autoregression slopes: a minimiser of the Jaeckel
/// dispersion. Requires n_eff > p and a design without intercept.
///
/// Throws RankDeficientError when a lag column is constant and ConvergenceError
/// (carrying the best point) when the optimality probe cannot be satisfied.
RFit fit_r_estimator(const LaggedDesign& design, const ScoreFn& score, const RSolverOptions& opts = {});

/// k-th smallest residual X_t - Y_{t-1}^T slopes with k = max(1, floor(n_eff * alpha)).
double residual_location_quantile(const LaggedDesign& design, const RFit& fit, double alpha);

}  // namespace arcvar
