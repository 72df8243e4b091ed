#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "arcvar/rng.hpp"

namespace arcvar {

enum class ScenarioTag { normal, t3, mixture, contamination };

/// Innovation law for the Monte Carlo study. Every law has mean zero.
///   normal         N(0, 1)
///   t3             Student t with 3 degrees of freedom scaled by sqrt(1/3)
///   mixture        0.9 N(0, 1) + 0.1 N(0, 3^2)
///   contamination  0.99 N(0, 1) + 0.01 N(0, 10^2)
class InnovationScenario {
 public:
  static InnovationScenario normal();
  static InnovationScenario t3();
  static InnovationScenario mixture();
  static InnovationScenario contamination();

  /// Accepts "normal", "t3", "mixture", "contamination" (case-insensitive).
  static InnovationScenario from_name(std::string_view name);

  ScenarioTag tag() const noexcept { return tag_; }

  /// Display name: "Normal", "t3", "Mixture", "Contamination".
  std::string_view name() const noexcept;

  double variance() const noexcept;

  /// Survival function P(Z > x).
  double survival(double x) const;

  /// Quantile from the upper-tail probability q = 1 - u, which keeps precision
  /// for u close to 1.
  double upper_quantile(double q) const;

  /// Stateful draw functor; keep one per generator stream.
  class Sampler {
   public:
    explicit Sampler(const InnovationScenario& scenario);
    double operator()(Rng& rng);

   private:
    ScenarioTag tag_;
    double weight_;
    double wide_sd_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_{3.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  };

  Sampler sampler() const { return Sampler(*this); }

  friend bool operator==(const InnovationScenario& a, const InnovationScenario& b) noexcept {
    return a.tag_ == b.tag_;
  }

 private:
  explicit InnovationScenario(ScenarioTag tag, double contaminated_weight, double contaminated_sd)
      : tag_(tag), weight_(contaminated_weight), wide_sd_(contaminated_sd) {}

  ScenarioTag tag_;
  double weight_;   // weight of the wide Gaussian component (mixtures only)
  double wide_sd_;  // standard deviation of the wide component
};

/// n i.i.d. draws from a generator seeded by `seed`.
std::vector<double> sample_innovations(const InnovationScenario& scenario, std::size_t n,
                                       std::uint64_t seed);

}  // namespace arcvar
