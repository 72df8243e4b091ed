#include "arcvar/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/roots.hpp>

#include "arcvar/error.hpp"

namespace arcvar {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
const boost::math::students_t_distribution<double> kT3(3.0);
const double kT3Scale = std::sqrt(1.0 / 3.0);

}  // namespace

InnovationScenario InnovationScenario::normal() { return InnovationScenario(ScenarioTag::normal, 0.0, 1.0); }
InnovationScenario InnovationScenario::t3() { return InnovationScenario(ScenarioTag::t3, 0.0, 1.0); }
InnovationScenario InnovationScenario::mixture() { return InnovationScenario(ScenarioTag::mixture, 0.1, 3.0); }
InnovationScenario InnovationScenario::contamination() {
  return InnovationScenario(ScenarioTag::contamination, 0.01, 10.0);
}

InnovationScenario InnovationScenario::from_name(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  if (key == "normal" || key == "gaussian") return normal();
  if (key == "t3") return t3();
  if (key == "mixture") return mixture();
  if (key == "contamination") return contamination();
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected normal, t3, mixture or contamination)");
}

std::string_view InnovationScenario::name() const noexcept {
  switch (tag_) {
    case ScenarioTag::normal: return "Normal";
    case ScenarioTag::t3: return "t3";
    case ScenarioTag::mixture: return "Mixture";
    case ScenarioTag::contamination: return "Contamination";
  }
  return "unknown";
}

double InnovationScenario::variance() const noexcept {
  switch (tag_) {
    case ScenarioTag::normal:
    case ScenarioTag::t3: return 1.0;
    case ScenarioTag::mixture:
    case ScenarioTag::contamination: return (1.0 - weight_) + weight_ * wide_sd_ * wide_sd_;
  }
  return 1.0;
}

double InnovationScenario::survival(double x) const {
  using boost::math::cdf;
  using boost::math::complement;
  switch (tag_) {
    case ScenarioTag::normal: return cdf(complement(kStdNormal, x));
    case ScenarioTag::t3: return cdf(complement(kT3, x / kT3Scale));
    case ScenarioTag::mixture:
    case ScenarioTag::contamination:
      return (1.0 - weight_) * cdf(complement(kStdNormal, x)) + weight_ * cdf(complement(kStdNormal, x / wide_sd_));
  }
  return 0.0;
}

double InnovationScenario::upper_quantile(double q) const {
  using boost::math::complement;
  using boost::math::quantile;
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("tail probability must lie in (0, 1)");
  switch (tag_) {
    case ScenarioTag::normal: return quantile(complement(kStdNormal, q));
    case ScenarioTag::t3: return kT3Scale * quantile(complement(kT3, q));
    case ScenarioTag::mixture:
    case ScenarioTag::contamination: {
      // A mixture quantile lies between its component quantiles.
      const double narrow = quantile(complement(kStdNormal, q));
      const double wide = wide_sd_ * narrow;
      double lo = std::min(narrow, wide);
      double hi = std::max(narrow, wide);
      if (lo == hi) return lo;
      auto gap = [&](double x) { return survival(x) - q; };
      std::uintmax_t max_iter = 200;
      const auto [a, b] =
          boost::math::tools::toms748_solve(gap, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
      return 0.5 * (a + b);
    }
  }
  return 0.0;
}

InnovationScenario::Sampler::Sampler(const InnovationScenario& scenario)
    : tag_(scenario.tag_), weight_(scenario.weight_), wide_sd_(scenario.wide_sd_) {}

double InnovationScenario::Sampler::operator()(Rng& rng) {
  switch (tag_) {
    case ScenarioTag::normal: return normal_(rng);
    case ScenarioTag::t3: return kT3Scale * student_(rng);
    case ScenarioTag::mixture:
    case ScenarioTag::contamination: {
      const bool wide = uniform_(rng) < weight_;
      const double z = normal_(rng);
      return wide ? wide_sd_ * z : z;
    }
  }
  return 0.0;
}

std::vector<double> sample_innovations(const InnovationScenario& scenario, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  auto draw = scenario.sampler();
  std::vector<double> out(n);
  for (double& z : out) z = draw(rng);
  return out;
}

}  // namespace arcvar
