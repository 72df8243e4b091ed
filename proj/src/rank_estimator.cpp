#include "arcvar/rank_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "arcvar/error.hpp"
#include "arcvar/order_stats.hpp"

namespace arcvar {

ScoreFn::ScoreFn(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("score parameter lambda must lie in (0, 1)");
}

double ScoreFn::operator()(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("score argument must lie in (0, 1)");
  return u < lambda_ ? lambda_ - 1.0 : lambda_;
}

std::size_t ScoreFn::lower_count(std::size_t n) const noexcept {
  const double denom = static_cast<double>(n) + 1.0;
  std::size_t m = 0;
  // Same comparison as operator() so the two never disagree at a boundary.
  while (m < n && static_cast<double>(m + 1) / denom < lambda_) ++m;
  return m;
}

double ScoreFn::centering(std::size_t n) const noexcept {
  if (n == 0) return 0.0;
  return lambda_ - static_cast<double>(lower_count(n)) / static_cast<double>(n);
}

double score_eval(const ScoreFn& score, double u) { return score(u); }

std::vector<std::size_t> ranks(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DataError("cannot rank non-finite value at index " + std::to_string(i));
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> out(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) out[order[pos]] = pos + 1;
  return out;
}

double jaeckel_dispersion(std::span<const double> residuals, const ScoreFn& score) {
  const std::size_t n = residuals.size();
  if (n == 0) return 0.0;
  const std::vector<std::size_t> rk = ranks(residuals);
  const double centre = score.centering(n);
  const double denom = static_cast<double>(n) + 1.0;
  // Centred scores sum to zero, so measuring residuals from residuals[0]
  // leaves D unchanged and makes it exactly zero for constant residuals.
  const double ref = residuals[0];
  double d = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    d += (residuals[t] - ref) * (score(static_cast<double>(rk[t]) / denom) - centre);
  }
  return d;
}

double jaeckel_dispersion(const LaggedDesign& design, std::span<const double> b, const ScoreFn& score) {
  if (design.with_intercept) {
    throw std::invalid_argument("rank dispersion is location invariant; build the design without an intercept");
  }
  return jaeckel_dispersion(residuals(design, b), score);
}

std::string_view to_string(RSolver method) noexcept {
  switch (method) {
    case RSolver::exact_lp: return "exact_lp";
    case RSolver::coordinate_search: return "coordinate_search";
  }
  return "unknown";
}

namespace {

struct SearchResult {
  std::vector<double> b;
  double d = 0.0;
  int evaluations = 0;
};

class Objective {
 public:
  Objective(const LaggedDesign& design, const ScoreFn& score) : design_(design), score_(score) {}

  double operator()(std::span<const double> b) {
    ++evaluations;
    return jaeckel_dispersion(residuals(design_, b), score_);
  }

  int evaluations = 0;

 private:
  const LaggedDesign& design_;
  const ScoreFn& score_;
};

// Axis moves, then pairwise diagonal moves, with a Hooke-Jeeves pattern step
// after every success. The step halves only when no direction improves.
SearchResult coordinate_search(Objective& f, std::vector<double> b, double step, double min_step, int max_evals) {
  const std::size_t p = b.size();
  double d = f(b);
  const int start_evals = f.evaluations;
  std::vector<double> trial(p);

  auto try_move = [&](const std::vector<double>& delta) {
    for (std::size_t j = 0; j < p; ++j) trial[j] = b[j] + delta[j];
    const double dt = f(trial);
    if (dt < d) {
      b = trial;
      d = dt;
      return true;
    }
    return false;
  };

  std::vector<double> delta(p);
  while (step > min_step && f.evaluations - start_evals < max_evals) {
    const std::vector<double> before = b;
    bool improved = false;
    for (std::size_t j = 0; j < p && !improved; ++j) {
      for (double sign : {1.0, -1.0}) {
        std::fill(delta.begin(), delta.end(), 0.0);
        delta[j] = sign * step;
        if (try_move(delta)) {
          improved = true;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < p && !improved; ++i) {
      for (std::size_t j = i + 1; j < p && !improved; ++j) {
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            std::fill(delta.begin(), delta.end(), 0.0);
            delta[i] = si * step / std::sqrt(2.0);
            delta[j] = sj * step / std::sqrt(2.0);
            if (try_move(delta)) {
              improved = true;
              break;
            }
          }
          if (improved) break;
        }
      }
    }
    if (improved) {
      for (std::size_t j = 0; j < p; ++j) delta[j] = b[j] - before[j];
      while (try_move(delta)) {
      }
    } else {
      step *= 0.5;
    }
  }
  return {std::move(b), d, f.evaluations - start_evals};
}

struct Probe {
  bool certified = true;
  double gap = 0.0;
};

Probe probe_optimality(Objective& f, std::span<const double> b, double d, const RSolverOptions& opts) {
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  const double h = opts.x_tol * scale;
  const double f_abs = opts.f_tol * (1.0 + std::abs(d));
  Probe probe;
  std::vector<double> trial(b.begin(), b.end());
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (double sign : {1.0, -1.0}) {
      trial[j] = b[j] + sign * h;
      const double dt = f(trial);
      probe.gap = std::max(probe.gap, (d - dt) / h);
      if (dt < d - f_abs) probe.certified = false;
      trial[j] = b[j];
    }
  }
  return probe;
}

std::vector<double> least_squares_slopes(const LaggedDesign& design) {
  Eigen::MatrixXd x(design.lags.rows(), design.lags.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(design.lags.cols()) = design.lags;
  const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(design.responses);
  return {coef.data() + 1, coef.data() + coef.size()};
}

}  // namespace

RFit fit_r_estimator(const LaggedDesign& design, const ScoreFn& score, const RSolverOptions& opts) {
  if (design.with_intercept) {
    throw std::invalid_argument("R-estimation fits slopes only; build the design without an intercept");
  }
  const std::size_t n = design.rows();
  const std::size_t p = design.order();
  if (p == 0) throw std::invalid_argument("R-estimation needs at least one lag");
  if (n <= p) {
    throw DataError("R-estimation needs more than " + std::to_string(p) + " rows, got " + std::to_string(n));
  }
  for (Eigen::Index j = 0; j < design.lags.cols(); ++j) {
    const auto col = design.lags.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      throw RankDeficientError("lag column " + std::to_string(j + 1) + " is constant; slopes are not identified");
    }
  }

  Objective f(design, score);
  RFit fit;
  fit.lambda = score.lambda();
  fit.method = opts.method;

  const std::vector<double> start = least_squares_slopes(design);
  fit.dispersion_at_start = f(start);

  const std::size_t m = score.lower_count(n);
  if (m == 0 || m == n) {
    // Every centred score is zero: the dispersion is identically zero.
    fit.slopes = start;
    fit.dispersion_at_min = fit.dispersion_at_start;
    return fit;
  }

  double scale = 1.0;
  for (double v : start) scale = std::max(scale, std::abs(v));
  const double min_step = opts.x_tol * scale;

  std::vector<double> best;
  double best_d = 0.0;
  if (opts.method == RSolver::exact_lp) {
    // With the two-valued score, D(b) = min_xi sum rho_{m/n}(X_t - b^T Y_{t-1} - xi),
    // so the minimiser is the slope part of an intercept-augmented check-loss fit.
    Eigen::MatrixXd x(design.lags.rows(), design.lags.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(design.lags.cols()) = design.lags;
    const double tau = static_cast<double>(m) / static_cast<double>(n);
    const QuantRegFit lp = solve_quantile_regression(x, design.responses, tau, opts.lp);
    best.assign(lp.coeffs.data() + 1, lp.coeffs.data() + lp.coeffs.size());
    best_d = f(best);
    fit.trace.iterations = lp.pivots;
  } else {
    std::vector<std::vector<double>> starts{start};
    for (int r = 1; r <= opts.max_restarts; ++r) {
      std::vector<double> s = start;
      const double factor = opts.restart_spread * static_cast<double>((r + 1) / 2);
      const double sign = (r % 2 == 1) ? 1.0 : -1.0;
      for (double& v : s) v += sign * factor * std::max(std::abs(v), 0.1);
      starts.push_back(std::move(s));
    }
    for (std::size_t r = 0; r < starts.size(); ++r) {
      SearchResult res = coordinate_search(f, starts[r], 0.25 * scale, min_step, opts.max_iterations);
      fit.trace.iterations += res.evaluations;
      if (r == 0 || res.d < best_d) {
        best = std::move(res.b);
        best_d = res.d;
      }
    }
    fit.trace.restarts = opts.max_restarts;
  }

  Probe probe = probe_optimality(f, best, best_d, opts);
  if (!probe.certified) {
    SearchResult res = coordinate_search(f, best, 16.0 * min_step, 0.01 * min_step, opts.max_iterations);
    fit.trace.iterations += res.evaluations;
    ++fit.trace.restarts;
    best = std::move(res.b);
    best_d = res.d;
    probe = probe_optimality(f, best, best_d, opts);
    if (!probe.certified) {
      throw ConvergenceError("R-estimator failed its optimality probe (gap " + std::to_string(probe.gap) + ")",
                             best);
    }
  }

  fit.slopes = std::move(best);
  fit.dispersion_at_min = best_d;
  fit.trace.subgradient_gap = probe.gap;
  return fit;
}

double residual_location_quantile(const LaggedDesign& design, const RFit& fit, double alpha) {
  const std::vector<double> r = residuals(design, fit.slopes);
  if (r.empty()) throw DataError("design has no rows");
  return kth_smallest(r, order_stat_rank(r.size(), alpha));
}

}  // namespace arcvar
