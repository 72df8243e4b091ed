#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

std::vector<std::size_t> ranks(std::span<const double> v) {
  std::vector<std::size_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t r = 1;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i] || (v[j] == v[i] && j < i)) ++r;
    }
    out[i] = r;
  }
  return out;
}

namespace {

double step_score(double lambda, double u) { return u < lambda ? lambda - 1.0 : lambda; }

}  // namespace

double dispersion(std::span<const double> r, double lambda) {
  const std::size_t n = r.size();
  const double denom = static_cast<double>(n + 1);
  double jbar = 0.0;
  for (std::size_t i = 1; i <= n; ++i) jbar += step_score(lambda, static_cast<double>(i) / denom);
  jbar /= static_cast<double>(n);
  const std::vector<std::size_t> rk = ranks(r);
  double d = 0.0;
  for (std::size_t t = 0; t < n; ++t) d += r[t] * (step_score(lambda, static_cast<double>(rk[t]) / denom) - jbar);
  return d;
}

double dispersion_p1(std::span<const double> y, std::span<const double> x, double b, double lambda) {
  std::vector<double> r(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) r[t] = y[t] - b * x[t];
  return dispersion(r, lambda);
}

namespace {

std::vector<double> breakpoints(std::span<const double> y, std::span<const double> x) {
  std::vector<double> bp;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      if (x[i] != x[j]) bp.push_back((y[i] - y[j]) / (x[i] - x[j]));
    }
  }
  if (bp.empty()) throw std::invalid_argument("oracle: regressor is constant");
  return bp;
}

}  // namespace

double min_dispersion_bisection(std::span<const double> y, std::span<const double> x, double lambda) {
  const std::vector<double> bp = breakpoints(y, x);
  const auto [lo_it, hi_it] = std::minmax_element(bp.begin(), bp.end());
  const double lo = *lo_it - 1.0;
  const double hi = *hi_it + 1.0;
  auto f = [&](double b) { return dispersion_p1(y, x, b, lambda); };

  constexpr int kGrid = 2000;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = f(lo + (hi - lo) * i / kGrid);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / kGrid;
  double b = lo + (hi - lo) * std::min(kGrid, best_i + 1) / kGrid;
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::min(best, f(0.5 * (a + b)));
}

std::pair<double, double> min_dispersion_breakpoints(std::span<const double> y, std::span<const double> x,
                                                     double lambda) {
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (double b : breakpoints(y, x)) {
    const double v = dispersion_p1(y, x, b, lambda);
    if (v < best) {
      best = v;
      arg = b;
    }
  }
  return {best, arg};
}

double check_loss(double alpha, double u) {
  if (u > 0) return alpha * u;
  if (u < 0) return (alpha - 1.0) * u;
  return 0.0;
}

double check_objective(std::span<const double> z, double alpha, double xi) {
  double s = 0.0;
  for (double v : z) s += check_loss(alpha, v - xi);
  return s;
}

double check_min(std::span<const double> z, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  for (double xi : z) best = std::min(best, check_objective(z, alpha, xi));
  return best;
}

std::pair<double, double> check_argmin_interval(std::span<const double> z, double alpha) {
  const double best = check_min(z, alpha);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double xi : z) {
    if (check_objective(z, alpha, xi) <= best + 1e-12 * (1.0 + std::abs(best))) {
      lo = std::min(lo, xi);
      hi = std::max(hi, xi);
    }
  }
  return {lo, hi};
}

double top_k_mean(std::span<const double> z, std::size_t k) {
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += s[i];
  return sum / static_cast<double>(k);
}

double exhaustive_basis_min(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start, Eigen::Index depth) {
    if (depth == k) {
      Eigen::MatrixXd xh(k, k);
      Eigen::VectorXd yh(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        xh.row(r) = x.row(idx[static_cast<std::size_t>(r)]);
        yh(r) = y(idx[static_cast<std::size_t>(r)]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(xh);
      if (lu.rank() < k) return;
      const Eigen::VectorXd b = lu.solve(yh);
      double obj = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) obj += check_loss(tau, y(i) - x.row(i).dot(b));
      best = std::min(best, obj);
      return;
    }
    for (Eigen::Index i = start; i < n; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

template <class F>
double bisect_decreasing(F sf, double target, double lo, double hi) {
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sf(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double normal_es_quadrature(double alpha) {
  const double q = bisect_decreasing(normal_sf, 1.0 - alpha, -40.0, 40.0);
  constexpr int kIntervals = 200000;
  const double a = q;
  const double b = q + 40.0;
  const double h = (b - a) / kIntervals;
  double s = a * normal_pdf(a) + b * normal_pdf(b);
  for (int i = 1; i < kIntervals; ++i) {
    const double x = a + i * h;
    s += (i % 2 ? 4.0 : 2.0) * x * normal_pdf(x);
  }
  return s * h / 3.0 / (1.0 - alpha);
}

double t3_unit_es(double alpha) {
  // t_3: sf(t) = 1/2 - (1/pi)[t / (sqrt3 (1 + t^2/3)) + atan(t / sqrt3)],
  // pdf(t) = 6 sqrt3 / (pi (3 + t^2)^2), ES = pdf(q) (3 + q^2) / (2 (1 - alpha)).
  const double r3 = std::sqrt(3.0);
  auto sf = [&](double t) {
    return 0.5 - (t / (r3 * (1.0 + t * t / 3.0)) + std::atan(t / r3)) / std::numbers::pi;
  };
  const double q = bisect_decreasing(sf, 1.0 - alpha, -1e4, 1e4);
  const double pdf = 6.0 * r3 / (std::numbers::pi * (3.0 + q * q) * (3.0 + q * q));
  const double es = pdf * (3.0 + q * q) / (2.0 * (1.0 - alpha));
  return es / r3;
}

double normal_mixture_es(std::span<const double> weights, std::span<const double> sds, double alpha) {
  auto sf = [&](double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * normal_sf(x / sds[i]);
    return s;
  };
  const double q = bisect_decreasing(sf, 1.0 - alpha, -1e3, 1e3);
  double tail = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) tail += weights[i] * sds[i] * normal_pdf(q / sds[i]);
  return tail / (1.0 - alpha);
}

double root_radius(std::span<const double> phi) {
  const std::size_t p = phi.size();
  // Coefficients of the monic polynomial, highest degree first.
  std::vector<double> c(p + 1);
  c[0] = 1.0;
  for (std::size_t j = 0; j < p; ++j) c[j + 1] = -phi[j];
  auto eval = [&](std::complex<double> z) {
    std::complex<double> v = 0.0;
    for (double a : c) v = v * z + a;
    return v;
  };
  std::vector<std::complex<double>> roots(p);
  const std::complex<double> seed(0.4, 0.9);
  for (std::size_t i = 0; i < p; ++i) roots[i] = std::pow(seed, static_cast<double>(i));
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < p; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const std::complex<double> delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      change = std::max(change, std::abs(delta));
    }
    if (change < 1e-15) break;
  }
  double radius = 0.0;
  for (const auto& z : roots) radius = std::max(radius, std::abs(z));
  return radius;
}

}  // namespace oracle
