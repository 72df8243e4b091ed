#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "arcvar/ar_model.hpp"

namespace arcvar {

/// rho_alpha(u) = alpha * u for u > 0, (1 - alpha) * (-u) for u < 0, 0 at 0.
double check_loss(double alpha, double u) noexcept;

struct QuantRegOptions {
  int irls_iterations = 60;
  double irls_min_smoothing = 1e-8;  // final smoothing, relative to the residual scale
  int max_pivots = 200000;
};

/// Exact minimiser of sum_i rho_tau(y_i - x_i^T b) at a vertex of the LP.
struct QuantRegFit {
  Eigen::VectorXd coeffs;
  double objective = 0.0;
  std::vector<Eigen::Index> basis;  // rows fitted exactly
  int irls_iterations = 0;
  int pivots = 0;
};

/// Check-loss regression. A smoothed IRLS pass supplies a starting basis, then
/// basis-exchange descent (one edge of the LP polytope per pivot, with a
/// weighted-median line search) runs until no edge direction decreases the
/// objective. That stopping rule is the subgradient optimality certificate.
///
/// Throws RankDeficientError when X does not have full column rank and
/// ConvergenceError after max_pivots.
QuantRegFit solve_quantile_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      double tau, const QuantRegOptions& opts = {});

/// alpha-autoregression quantile (phi_0(alpha), phi_1(alpha), ..., phi_p(alpha)).
struct ARQuantile {
  double alpha = 0.5;
  std::vector<double> coeffs;
  double objective = 0.0;
  std::size_t neg_count = 0;
  std::size_t zero_count = 0;
  std::size_t pos_count = 0;
  int pivots = 0;
};

/// Requires a design built with an intercept, n_eff > p + 1 and
/// n_eff * min(alpha, 1 - alpha) >= 1.
ARQuantile fit_ar_quantile(const LaggedDesign& design, double alpha, const QuantRegOptions& opts = {});

}  // namespace arcvar
