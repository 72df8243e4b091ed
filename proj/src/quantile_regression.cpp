#include "arcvar/quantile_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "arcvar/error.hpp"

namespace arcvar {

double check_loss(double alpha, double u) noexcept {
  if (u > 0.0) return alpha * u;
  if (u < 0.0) return (alpha - 1.0) * u;
  return 0.0;
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double total_loss(const VectorXd& r, double tau) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += check_loss(tau, r(i));
  return s;
}

VectorXd irls_start(const MatrixXd& x, const VectorXd& y, double tau, const QuantRegOptions& opts,
                    int& iterations) {
  VectorXd b = x.colPivHouseholderQr().solve(y);
  VectorXd r = y - x * b;
  const double scale = r.cwiseAbs().mean();
  if (!(scale > 0.0)) return b;

  const double min_eps = opts.irls_min_smoothing * scale;
  double eps = 0.1 * scale;
  VectorXd w(y.size());
  for (iterations = 0; iterations < opts.irls_iterations; ++iterations) {
    for (Index i = 0; i < r.size(); ++i) {
      w(i) = (r(i) > 0.0 ? tau : 1.0 - tau) / std::max(std::abs(r(i)), eps);
    }
    const MatrixXd xtw = x.transpose() * w.asDiagonal();
    const VectorXd next = (xtw * x).ldlt().solve(xtw * y);
    if (!next.allFinite()) break;
    const double change = (next - b).lpNorm<Eigen::Infinity>();
    b = next;
    r = y - x * b;
    if (eps <= min_eps && change <= 1e-12 * (1.0 + b.lpNorm<Eigen::Infinity>())) break;
    eps = std::max(0.5 * eps, min_eps);
  }
  return b;
}

// Greedy choice of k linearly independent rows, preferring small |residual|.
std::vector<Index> starting_basis(const MatrixXd& x, const VectorXd& r) {
  const Index n = x.rows();
  const Index k = x.cols();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(r(a)) < std::abs(r(b)); });

  std::vector<Index> basis;
  MatrixXd q(k, k);  // orthonormal directions spanned so far, by column
  for (Index i : order) {
    if (static_cast<Index>(basis.size()) == k) break;
    VectorXd v = x.row(i).transpose();
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (Index c = 0; c < static_cast<Index>(basis.size()); ++c) v -= q.col(c).dot(v) * q.col(c);
    for (Index c = 0; c < static_cast<Index>(basis.size()); ++c) v -= q.col(c).dot(v) * q.col(c);
    const double norm1 = v.norm();
    if (norm1 <= 1e-9 * norm0) continue;
    q.col(static_cast<Index>(basis.size())) = v / norm1;
    basis.push_back(i);
  }
  if (static_cast<Index>(basis.size()) < k) {
    throw RankDeficientError("regressor matrix is rank deficient");
  }
  return basis;
}

struct Breakpoint {
  double step;
  double weight;  // slope increment at the crossing
  Index row;
};

struct Edge {
  Index slot = -1;   // position in the basis that leaves
  double sign = 0.0;  // +1 or -1 along the inverse column
  double rate = 0.0;  // directional derivative
};

}  // namespace

QuantRegFit solve_quantile_regression(const MatrixXd& x, const VectorXd& y, double tau,
                                      const QuantRegOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  if (x.rows() != y.size()) throw std::invalid_argument("regressor rows and responses differ in length");
  const Index n = x.rows();
  const Index k = x.cols();
  if (k == 0) throw std::invalid_argument("regression needs at least one regressor");
  if (n < k) throw RankDeficientError("fewer observations than regressors");
  if (!x.allFinite() || !y.allFinite()) throw DataError("regression input is not finite");

  {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw RankDeficientError("regressor matrix is rank deficient");
  }

  QuantRegFit fit;
  VectorXd b = irls_start(x, y, tau, opts, fit.irls_iterations);
  VectorXd r = y - x * b;
  std::vector<Index> basis = starting_basis(x, r);

  const double y_scale = std::max(y.lpNorm<Eigen::Infinity>(), x.lpNorm<Eigen::Infinity>());
  const double zero_tol = 1e-11 * std::max(y_scale, 1e-300);

  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  std::vector<Breakpoint> breaks;
  MatrixXd xh(k, k);
  VectorXd yh(k);

  for (fit.pivots = 0;; ++fit.pivots) {
    for (Index j = 0; j < k; ++j) {
      xh.row(j) = x.row(basis[static_cast<std::size_t>(j)]);
      yh(j) = y(basis[static_cast<std::size_t>(j)]);
    }
    Eigen::FullPivLU<MatrixXd> lu(xh);
    if (!lu.isInvertible()) {
      throw ConvergenceError("basis became singular", {b.data(), b.data() + b.size()});
    }
    const MatrixXd inv = lu.inverse();
    b = inv * yh;
    r = y - x * b;
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (Index h : basis) {
      r(h) = 0.0;
      in_basis[static_cast<std::size_t>(h)] = 1;
    }

    if (fit.pivots >= opts.max_pivots) {
      throw ConvergenceError("quantile regression exceeded " + std::to_string(opts.max_pivots) + " pivots",
                             {b.data(), b.data() + b.size()});
    }

    // Moving b along sign * inv.col(j) frees basis row j and keeps the
    // others exact; row i's residual changes at rate -sign * z(i, j).
    const MatrixXd z = x * inv;
    Edge best;
    double best_score = 0.0;
    for (Index j = 0; j < k; ++j) {
      const double dnorm = inv.col(j).norm();
      for (double sign : {1.0, -1.0}) {
        double rate = sign > 0.0 ? 1.0 - tau : tau;
        double magnitude = 1.0;
        for (Index i = 0; i < n; ++i) {
          if (in_basis[static_cast<std::size_t>(i)]) continue;
          const double s = -sign * z(i, j);
          if (s == 0.0) continue;
          magnitude += std::abs(s);
          if (r(i) > zero_tol) {
            rate += tau * s;
          } else if (r(i) < -zero_tol) {
            rate += (tau - 1.0) * s;
          } else {
            rate += s > 0.0 ? tau * s : (tau - 1.0) * s;
          }
        }
        if (rate < -1e-12 * magnitude) {
          const double score = rate / dnorm;
          if (score < best_score) {
            best_score = score;
            best = {j, sign, rate};
          }
        }
      }
    }
    if (best.slot < 0) break;

    // Weighted-median line search: slope rises by |s| at each zero crossing.
    breaks.clear();
    for (Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)] || std::abs(r(i)) <= zero_tol) continue;
      const double s = -best.sign * z(i, best.slot);
      if (s == 0.0) continue;
      const double step = -r(i) / s;
      if (step > 0.0) breaks.push_back({step, std::abs(s), i});
    }
    std::sort(breaks.begin(), breaks.end(),
              [](const Breakpoint& a, const Breakpoint& c) { return a.step < c.step; });
    double slope = best.rate;
    Index entering = -1;
    for (const Breakpoint& bp : breaks) {
      slope += bp.weight;
      if (slope >= 0.0) {
        entering = bp.row;
        break;
      }
    }
    if (entering < 0) {
      throw ConvergenceError("check-loss objective unbounded along an edge", {b.data(), b.data() + b.size()});
    }
    basis[static_cast<std::size_t>(best.slot)] = entering;
  }

  fit.coeffs = b;
  fit.objective = total_loss(r, tau);
  fit.basis = basis;
  return fit;
}

ARQuantile fit_ar_quantile(const LaggedDesign& design, double alpha, const QuantRegOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!design.with_intercept) {
    throw std::invalid_argument("autoregression quantile needs a design built with an intercept");
  }
  const std::size_t n = design.rows();
  const std::size_t p = design.order();
  if (n <= p + 1) {
    throw DataError("autoregression quantile needs more than " + std::to_string(p + 1) + " rows, got " +
                    std::to_string(n));
  }
  if (static_cast<double>(n) * std::min(alpha, 1.0 - alpha) < 1.0) {
    throw TailTooThinError("alpha=" + std::to_string(alpha) + " leaves an empty tail with " +
                           std::to_string(n) + " rows; use more data or a less extreme level");
  }

  const MatrixXd x = design.regressors();
  const QuantRegFit fit = solve_quantile_regression(x, design.responses, alpha, opts);

  ARQuantile out;
  out.alpha = alpha;
  out.coeffs.assign(fit.coeffs.data(), fit.coeffs.data() + fit.coeffs.size());
  out.objective = fit.objective;
  out.pivots = fit.pivots;

  const VectorXd r = design.responses - x * fit.coeffs;
  const double scale = std::max(design.responses.lpNorm<Eigen::Infinity>(), 1e-300);
  for (Index i = 0; i < r.size(); ++i) {
    if (std::abs(r(i)) <= 1e-9 * scale) {
      ++out.zero_count;
    } else if (r(i) < 0.0) {
      ++out.neg_count;
    } else {
      ++out.pos_count;
    }
  }
  return out;
}

}  // namespace arcvar
