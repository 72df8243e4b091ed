#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arcvar/rng.hpp"

namespace arcvar {

inline constexpr std::size_t kDefaultBurnIn = 500;
inline constexpr double kStationarityTol = 1e-9;

/// Autoregression X_t = c + phi_1 X_{t-1} + ... + phi_p X_{t-p} + Z_t.
class ARModel {
 public:
  /// Throws std::invalid_argument for an empty or non-finite slope vector.
  explicit ARModel(std::vector<double> phi, std::optional<double> intercept = std::nullopt);

  /// As the constructor, but rejects (DataError) models whose characteristic
  /// roots are not strictly inside the unit circle.
  static ARModel require_stationary(std::vector<double> phi,
                                    std::optional<double> intercept = std::nullopt,
                                    double tol = kStationarityTol);

  std::size_t order() const noexcept { return phi_.size(); }
  std::span<const double> phi() const noexcept { return phi_; }
  std::optional<double> intercept() const noexcept { return intercept_; }

  /// "AR(1) phi=0.5", "AR(2) phi=(0.5,-0.2)".
  std::string label() const;

 private:
  std::vector<double> phi_;
  std::optional<double> intercept_;
};

/// Time-ordered finite observations.
class Series {
 public:
  /// Throws DataError when empty or when any value is non-finite.
  explicit Series(std::vector<double> values, std::string label = {});

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<double> values_;
  std::string label_;
};

/// Regression view of a series: row t holds X_t and (X_{t-1}, ..., X_{t-p}).
struct LaggedDesign {
  Eigen::VectorXd responses;
  Eigen::MatrixXd lags;  // n_eff x p, without the intercept column
  bool with_intercept = false;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(responses.size()); }
  std::size_t order() const noexcept { return static_cast<std::size_t>(lags.cols()); }

  /// lags, with a leading column of ones when with_intercept is set.
  Eigen::MatrixXd regressors() const;
};

/// Throws DataError when the series has fewer than p + 1 values. p = 0 gives an
/// intercept-only (or empty) regressor set.
LaggedDesign build_lagged_design(const Series& series, std::size_t p, bool with_intercept = false);

/// Row-wise concatenation of designs of equal order; used to pool segments
/// separated by missing data.
LaggedDesign stack_designs(std::span<const LaggedDesign> parts);

/// Runs the recursion from a zero state over all innovations and drops the first
/// burn_in values. Returns innovations.size() - burn_in values.
Series simulate_ar(const ARModel& model, std::span<const double> innovations, std::size_t burn_in,
                   bool require_stationary = true);

/// Draws burn_in + n innovations with `draw(rng)` from a generator seeded by
/// `seed`, then simulates as above.
template <class Draw>
Series simulate_ar(const ARModel& model, Draw&& draw, std::size_t n, std::size_t burn_in,
                   std::uint64_t seed, bool require_stationary = true) {
  Rng rng(seed);
  std::vector<double> innovations(burn_in + n);
  for (double& z : innovations) z = draw(rng);
  return simulate_ar(model, innovations, burn_in, require_stationary);
}

/// responses[t] - slopes . lags[t] (- intercept).
std::vector<double> residuals(const LaggedDesign& design, std::span<const double> slopes,
                              std::optional<double> intercept = std::nullopt);

struct Stationarity {
  bool stationary = false;
  double max_modulus = 0.0;
};

/// Spectral radius of the companion matrix of z^p - phi_1 z^{p-1} - ... - phi_p.
/// tol must lie in (0, 1e-3].
Stationarity check_stationary(std::span<const double> phi, double tol = kStationarityTol);
Stationarity check_stationary(const ARModel& model, double tol = kStationarityTol);

/// n_eff^{-1} sum_t y_t y_t^T over the regressor rows (with the leading 1 when
/// the design carries an intercept).
Eigen::MatrixXd design_covariance(const LaggedDesign& design);

}  // namespace arcvar
