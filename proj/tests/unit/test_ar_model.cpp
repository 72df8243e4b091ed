#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "arcvar/ar_model.hpp"
#include "arcvar/error.hpp"
#include "arcvar/scenario.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace arcvar;

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("model and series reject malformed input") {
  CHECK_THROWS_AS(ARModel(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ARModel({std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  CHECK_THROWS_AS(ARModel::require_stationary({1.0}), DataError);
  CHECK_THROWS_AS(ARModel::require_stationary({0.5, 0.6}), DataError);
  CHECK_NOTHROW(ARModel::require_stationary({0.5, -0.2}));
  CHECK_THROWS_AS(Series(std::vector<double>{}), DataError);
  CHECK_THROWS_AS(Series({1.0, std::numeric_limits<double>::infinity()}), DataError);
  CHECK(ARModel({0.5}).label() == "AR(1) phi=0.5");
  CHECK(ARModel({0.5, -0.2}).label() == "AR(2) phi=(0.5,-0.2)");
}

TEST_CASE("lagged design shifts the series") {
  const Series s({1, 2, 3, 4});

  SUBCASE("p = 1") {
    const LaggedDesign d = build_lagged_design(s, 1);
    CHECK(to_vec(d.responses) == std::vector<double>{2, 3, 4});
    CHECK(to_vec(d.lags.col(0)) == std::vector<double>{1, 2, 3});
    CHECK(d.rows() == 3);
    CHECK(d.order() == 1);
  }
  SUBCASE("p = 2") {
    const LaggedDesign d = build_lagged_design(s, 2);
    CHECK(to_vec(d.responses) == std::vector<double>{3, 4});
    CHECK(d.lags(0, 0) == 2);
    CHECK(d.lags(0, 1) == 1);
    CHECK(d.lags(1, 0) == 3);
    CHECK(d.lags(1, 1) == 2);
  }
  SUBCASE("series too short names the minimum length") {
    try {
      build_lagged_design(Series({1, 2, 3}), 3);
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("4") != std::string::npos);
    }
  }
  SUBCASE("intercept column") {
    const LaggedDesign d = build_lagged_design(s, 1, true);
    const Eigen::MatrixXd x = d.regressors();
    REQUIRE(x.cols() == 2);
    CHECK(x.col(0).isOnes());
    CHECK(to_vec(x.col(1)) == std::vector<double>{1, 2, 3});
    CHECK(d.lags.cols() == 1);
  }
}

TEST_CASE("reconstruction property: first p values plus responses give the series back") {
  gen::Gen g(101);
  for (int c = 0; c < 200; ++c) {
    CAPTURE(c);
    const std::size_t p = g.size(1, 4);
    const std::vector<double> v = g.sample(g.size(p + 1, 40));
    const LaggedDesign d = build_lagged_design(Series(v), p);
    REQUIRE(d.rows() == v.size() - p);
    std::vector<double> rebuilt(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p));
    for (double y : to_vec(d.responses)) rebuilt.push_back(y);
    CHECK(rebuilt == v);
    for (std::size_t t = 0; t < d.rows(); ++t) {
      for (std::size_t j = 1; j <= p; ++j) {
        CHECK(d.lags(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j - 1)) == v[t + p - j]);
      }
    }
  }
}

TEST_CASE("stacking concatenates rows") {
  const LaggedDesign a = build_lagged_design(Series({1, 2, 3}), 1);
  const LaggedDesign b = build_lagged_design(Series({10, 20}), 1);
  const std::vector<LaggedDesign> parts{a, b};
  const LaggedDesign s = stack_designs(parts);
  CHECK(to_vec(s.responses) == std::vector<double>{2, 3, 20});
  CHECK(to_vec(s.lags.col(0)) == std::vector<double>{1, 2, 10});
  const std::vector<LaggedDesign> mixed{a, build_lagged_design(Series({1, 2, 3}), 2)};
  CHECK_THROWS_AS(stack_designs(mixed), std::invalid_argument);
}

TEST_CASE("simulation follows the recursion from a zero state") {
  SUBCASE("white noise is the identity map") {
    const Series s = simulate_ar(ARModel({0.0}), std::vector<double>{1, 0, 0}, 0);
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{1, 0, 0});
  }
  SUBCASE("zero-noise recursion") {
    const Series s = simulate_ar(ARModel({0.5}), std::vector<double>{1, 0, 0}, 0);
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{1, 0.5, 0.25});
  }
  SUBCASE("burn-in drops the leading values") {
    const Series s = simulate_ar(ARModel({0.5}), std::vector<double>{1, 0, 0, 0}, 2);
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{0.25, 0.125});
  }
  SUBCASE("intercept enters every step") {
    const Series s = simulate_ar(ARModel({0.5}, 1.0), std::vector<double>{0, 0, 0}, 0);
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{1.0, 1.5, 1.75});
  }
  SUBCASE("same seed gives a bitwise identical series") {
    const ARModel m({0.8});
    const InnovationScenario t3 = InnovationScenario::t3();
    auto d1 = t3.sampler();
    auto d2 = t3.sampler();
    const Series a = simulate_ar(m, d1, 300, kDefaultBurnIn, 99);
    const Series b = simulate_ar(m, d2, 300, kDefaultBurnIn, 99);
    REQUIRE(a.size() == 300);
    CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
          std::vector<double>(b.values().begin(), b.values().end()));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(simulate_ar(ARModel({1.2}), std::vector<double>{1, 0, 0}, 0), DataError);
    CHECK_NOTHROW(simulate_ar(ARModel({1.2}), std::vector<double>{1, 0, 0}, 0, false));
    CHECK_THROWS_AS(simulate_ar(ARModel({0.5}), std::vector<double>{1, std::nan(""), 0}, 0), DataError);
  }
}

TEST_CASE("zero innovations from a zero state stay at zero") {
  gen::Gen g(7);
  for (int c = 0; c < 50; ++c) {
    const std::size_t p = g.size(1, 3);
    std::vector<double> phi(p);
    do {
      for (double& v : phi) v = g.uniform(-0.6, 0.6);
    } while (!check_stationary(phi).stationary);
    const Series s = simulate_ar(ARModel(phi), std::vector<double>(60, 0.0), 10);
    for (double v : s.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("residuals") {
  const LaggedDesign d = build_lagged_design(Series({1.0, 0.5, 0.25}), 1);
  CHECK(residuals(d, std::vector<double>{0.5}) == std::vector<double>{0.0, 0.0});
  CHECK(residuals(d, std::vector<double>{0.0}) == std::vector<double>{0.5, 0.25});
  CHECK(residuals(d, std::vector<double>{0.5}, 1.0) == std::vector<double>{-1.0, -1.0});
  CHECK_THROWS_AS(residuals(d, std::vector<double>{0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("residuals at the true slopes recover the innovations") {
  gen::Gen g(11);
  for (int c = 0; c < 100; ++c) {
    CAPTURE(c);
    const std::size_t p = g.size(1, 3);
    std::vector<double> phi(p);
    do {
      for (double& v : phi) v = g.uniform(-0.9, 0.9);
    } while (!check_stationary(phi).stationary);
    const std::size_t n = g.size(p + 2, 200);
    std::vector<double> z(n);
    for (double& e : z) e = g.normal(g.uniform(0.1, 5.0));
    const Series s = simulate_ar(ARModel(phi), z, 0);
    const std::vector<double> r = residuals(build_lagged_design(s, p), phi);
    double scale = 0.0;
    for (double v : s.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t t = 0; t < r.size(); ++t) CHECK(std::abs(r[t] - z[t + p]) <= 1e-12 * (1.0 + scale));
  }
}

TEST_CASE("stationarity verdict") {
  Stationarity s = check_stationary(ARModel({0.5}));
  CHECK(s.stationary);
  CHECK(s.max_modulus == doctest::Approx(0.5).epsilon(1e-12));

  s = check_stationary(ARModel({1.0}));
  CHECK_FALSE(s.stationary);
  CHECK(s.max_modulus == doctest::Approx(1.0).epsilon(1e-12));

  // Complex pair of z^2 - 0.5 z + 0.2 has modulus sqrt(c).
  const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 - 0.8, 0.0));
  const double expected = std::abs((std::complex<double>(0.5, 0.0) + disc) / 2.0);
  s = check_stationary(ARModel({0.5, -0.2}));
  CHECK(s.stationary);
  CHECK(std::abs(s.max_modulus - expected) < 1e-12);
  CHECK(std::abs(s.max_modulus - std::sqrt(0.2)) < 1e-12);

  CHECK_FALSE(check_stationary(std::vector<double>{1.0 - 1e-10}).stationary);
  CHECK(check_stationary(std::vector<double>{1.0 - 1e-8}).stationary);
  CHECK_THROWS_AS(check_stationary(ARModel({0.5}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_stationary(ARModel({0.5}), 1e-2), std::invalid_argument);
}

TEST_CASE("spectral radius matches an independent polynomial root finder") {
  gen::Gen g(23);
  for (int c = 0; c < 300; ++c) {
    CAPTURE(c);
    const std::size_t p = g.size(1, 6);
    std::vector<double> phi(p);
    for (double& v : phi) v = g.uniform(-1.2, 1.2) / static_cast<double>(p);
    CAPTURE(phi);
    const double expected = oracle::root_radius(phi);
    const Stationarity s = check_stationary(phi);
    CHECK(std::abs(s.max_modulus - expected) <= 1e-8 * std::max(1.0, expected));
    if (std::abs(expected - 1.0) > 1e-6) CHECK(s.stationary == (expected < 1.0));
  }
}

TEST_CASE("design covariance") {
  const LaggedDesign d = build_lagged_design(Series({1, 2, 3, 4}), 1);
  const Eigen::MatrixXd s = design_covariance(d);
  REQUIRE(s.rows() == 1);
  CHECK(s(0, 0) == doctest::Approx(14.0 / 3.0).epsilon(1e-15));

  const Eigen::MatrixXd z = design_covariance(build_lagged_design(Series({0, 0, 0, 5}), 2));
  CHECK(z.isZero(0.0));

  const Eigen::MatrixXd si = design_covariance(build_lagged_design(Series({1, 2, 3, 4}), 1, true));
  REQUIRE(si.rows() == 2);
  CHECK(si(0, 0) == doctest::Approx(1.0));
  CHECK(si(0, 1) == doctest::Approx(2.0));
  CHECK(si(1, 1) == doctest::Approx(14.0 / 3.0));
}

TEST_CASE("design covariance is symmetric positive semidefinite") {
  gen::Gen g(5);
  for (int c = 0; c < 200; ++c) {
    CAPTURE(c);
    const std::size_t p = g.size(1, 5);
    const LaggedDesign d = build_lagged_design(Series(g.sample(g.size(p + 1, 30))), p, g.coin());
    const Eigen::MatrixXd s = design_covariance(d);
    CHECK(s == s.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
  }
}
