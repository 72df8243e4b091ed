#include "arcvar/ar_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "arcvar/error.hpp"

namespace arcvar {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ARModel::ARModel(std::vector<double> phi, std::optional<double> intercept)
    : phi_(std::move(phi)), intercept_(intercept) {
  if (phi_.empty()) throw std::invalid_argument("AR model needs at least one slope");
  if (!all_finite(phi_)) throw std::invalid_argument("AR slopes must be finite");
  if (intercept_ && !std::isfinite(*intercept_)) throw std::invalid_argument("AR intercept must be finite");
}

ARModel ARModel::require_stationary(std::vector<double> phi, std::optional<double> intercept, double tol) {
  ARModel model(std::move(phi), intercept);
  const Stationarity s = check_stationary(model, tol);
  if (!s.stationary) {
    std::ostringstream msg;
    msg << model.label() << " is not stationary (largest root modulus " << s.max_modulus << ")";
    throw DataError(msg.str());
  }
  return model;
}

std::string ARModel::label() const {
  std::ostringstream os;
  os << "AR(" << phi_.size() << ") phi=";
  if (phi_.size() == 1) {
    os << phi_[0];
  } else {
    os << '(';
    for (std::size_t j = 0; j < phi_.size(); ++j) os << (j ? "," : "") << phi_[j];
    os << ')';
  }
  return os.str();
}

Series::Series(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) throw DataError("series is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

Eigen::MatrixXd LaggedDesign::regressors() const {
  if (!with_intercept) return lags;
  Eigen::MatrixXd x(lags.rows(), lags.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(lags.cols()) = lags;
  return x;
}

LaggedDesign build_lagged_design(const Series& series, std::size_t p, bool with_intercept) {
  if (series.size() <= p) {
    throw DataError("series of length " + std::to_string(series.size()) + " is too short for order " +
                    std::to_string(p) + ": need at least " + std::to_string(p + 1) + " values");
  }
  const std::size_t n_eff = series.size() - p;
  LaggedDesign d;
  d.with_intercept = with_intercept;
  d.responses.resize(static_cast<Eigen::Index>(n_eff));
  d.lags.resize(static_cast<Eigen::Index>(n_eff), static_cast<Eigen::Index>(p));
  for (std::size_t t = 0; t < n_eff; ++t) {
    const std::size_t src = t + p;
    d.responses(static_cast<Eigen::Index>(t)) = series[src];
    for (std::size_t j = 1; j <= p; ++j) {
      d.lags(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j - 1)) = series[src - j];
    }
  }
  return d;
}

LaggedDesign stack_designs(std::span<const LaggedDesign> parts) {
  if (parts.empty()) throw std::invalid_argument("no designs to stack");
  const Eigen::Index p = parts.front().lags.cols();
  Eigen::Index rows = 0;
  for (const auto& part : parts) {
    if (part.lags.cols() != p || part.with_intercept != parts.front().with_intercept) {
      throw std::invalid_argument("stacked designs must share order and intercept flag");
    }
    rows += part.responses.size();
  }
  LaggedDesign out;
  out.with_intercept = parts.front().with_intercept;
  out.responses.resize(rows);
  out.lags.resize(rows, p);
  Eigen::Index at = 0;
  for (const auto& part : parts) {
    const Eigen::Index m = part.responses.size();
    out.responses.segment(at, m) = part.responses;
    out.lags.middleRows(at, m) = part.lags;
    at += m;
  }
  return out;
}

Series simulate_ar(const ARModel& model, std::span<const double> innovations, std::size_t burn_in,
                   bool require_stationary) {
  if (require_stationary && !check_stationary(model).stationary) {
    throw DataError(model.label() + " is not stationary; refusing to simulate");
  }
  if (innovations.size() <= burn_in) {
    throw std::invalid_argument("need more innovations than burn-in steps");
  }
  const auto phi = model.phi();
  const std::size_t p = phi.size();
  const double c = model.intercept().value_or(0.0);

  std::vector<double> path(innovations.size(), 0.0);
  for (std::size_t t = 0; t < innovations.size(); ++t) {
    if (!std::isfinite(innovations[t])) {
      throw DataError("innovation at step " + std::to_string(t) + " is not finite");
    }
    double x = c + innovations[t];
    for (std::size_t j = 1; j <= p && j <= t; ++j) x += phi[j - 1] * path[t - j];
    if (!std::isfinite(x)) throw DataError("simulated path diverged at step " + std::to_string(t));
    path[t] = x;
  }
  path.erase(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(burn_in));
  return Series(std::move(path));
}

std::vector<double> residuals(const LaggedDesign& design, std::span<const double> slopes,
                              std::optional<double> intercept) {
  if (slopes.size() != design.order()) {
    throw std::invalid_argument("slope vector has " + std::to_string(slopes.size()) +
                                " entries, design order is " + std::to_string(design.order()));
  }
  const Eigen::Map<const Eigen::VectorXd> b(slopes.data(), static_cast<Eigen::Index>(slopes.size()));
  Eigen::VectorXd r = design.responses - design.lags * b;
  if (intercept) r.array() -= *intercept;
  return {r.data(), r.data() + r.size()};
}

Stationarity check_stationary(std::span<const double> phi, double tol) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("stationarity tolerance must lie in (0, 1e-3]");
  if (phi.empty()) throw std::invalid_argument("empty slope vector");

  double radius = 0.0;
  if (phi.size() == 1) {
    radius = std::abs(phi[0]);
  } else if (phi.size() == 2) {
    // z^2 - phi1 z - phi2 = 0
    const std::complex<double> disc = std::sqrt(std::complex<double>(phi[0] * phi[0] + 4.0 * phi[1], 0.0));
    const std::complex<double> r1 = (phi[0] + disc) / 2.0;
    const std::complex<double> r2 = (phi[0] - disc) / 2.0;
    radius = std::max(std::abs(r1), std::abs(r2));
  } else {
    const auto p = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = phi[static_cast<std::size_t>(j)];
    companion.bottomLeftCorner(p - 1, p - 1).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");
    radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  return {radius < 1.0 - tol, radius};
}

Stationarity check_stationary(const ARModel& model, double tol) { return check_stationary(model.phi(), tol); }

Eigen::MatrixXd design_covariance(const LaggedDesign& design) {
  const Eigen::MatrixXd x = design.regressors();
  if (x.rows() == 0) throw std::invalid_argument("design has no rows");
  Eigen::MatrixXd s = (x.transpose() * x) / static_cast<double>(x.rows());
  return (s + s.transpose()) / 2.0;
}

}  // namespace arcvar
