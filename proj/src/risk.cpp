#include "arcvar/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "arcvar/error.hpp"
#include "arcvar/order_stats.hpp"

namespace arcvar {

std::string_view to_string(CvarMethod method) noexcept {
  switch (method) {
    case CvarMethod::minimization: return "minimization";
    case CvarMethod::tail_average: return "tail_average";
  }
  return "unknown";
}

std::string_view to_string(TargetMethod method) noexcept {
  switch (method) {
    case TargetMethod::automatic: return "automatic";
    case TargetMethod::analytic: return "analytic";
    case TargetMethod::stratified_mc: return "stratified_mc";
    case TargetMethod::iid_mc: return "iid_mc";
  }
  return "unknown";
}

namespace {

void require_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

void require_sample(std::span<const double> sample) {
  if (sample.empty()) throw DataError("risk sample is empty");
  for (double z : sample) {
    if (!std::isfinite(z)) throw DataError("risk sample contains a non-finite value");
  }
}

}  // namespace

double var_hat(std::span<const double> sample, double alpha) {
  require_level(alpha);
  require_sample(sample);
  return kth_smallest(sample, order_stat_rank(sample.size(), alpha));
}

RiskReport cvar_min_form(std::span<const double> sample, double alpha) {
  require_level(alpha);
  require_sample(sample);
  const std::size_t n = sample.size();
  const std::size_t tail = guarded_floor(n, 1.0 - alpha);
  if (tail < 1) {
    throw TailTooThinError("floor(n(1-alpha)) is 0 for n=" + std::to_string(n) + ", alpha=" + std::to_string(alpha) +
                           "; use a larger sample or a smaller alpha");
  }

  std::vector<double> z(sample.begin(), sample.end());
  std::sort(z.begin(), z.end());
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + z[i];
  const double total = prefix[n];

  // Objective at xi = z[j]: alpha * (mass above) + (1 - alpha) * (mass below).
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = z[j];
    const double above = (total - prefix[j + 1]) - static_cast<double>(n - j - 1) * xi;
    const double below = static_cast<double>(j) * xi - prefix[j];
    const double value = alpha * above + (1.0 - alpha) * below;
    if (value < best) {
      best = value;
      arg = j;
    }
  }

  RiskReport report;
  report.alpha = alpha;
  report.n_eff = n;
  report.method = CvarMethod::minimization;
  report.xi_star = z[arg];
  report.var_hat = z[order_stat_rank(n, alpha) - 1];
  report.cvar_hat = best / static_cast<double>(tail) + total / static_cast<double>(n);
  return report;
}

double cvar_tail_average(std::span<const double> sample, double alpha) {
  const double v = var_hat(sample, alpha);
  double sum = 0.0;
  std::size_t count = 0;
  for (double z : sample) {
    if (z > v) {
      sum += z;
      ++count;
    }
  }
  if (count == 0) {
    throw TailTooThinError("no sample value exceeds VaR at alpha=" + std::to_string(alpha));
  }
  return sum / static_cast<double>(count);
}

namespace {

constexpr std::size_t kTargetBatches = 10;

// Tail average of one stratified sample of size m: stratum i holds
// Q((i - 1 + U_i) / m), so the sorted order is the stratum order.
double stratified_tail_average(const InnovationScenario& scenario, double alpha, std::size_t m, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t k = order_stat_rank(m, alpha);
  double sum = 0.0;
  for (std::size_t i = k + 1; i <= m; ++i) {
    const double upper = (static_cast<double>(m - i + 1) - uniform(rng)) / static_cast<double>(m);
    sum += scenario.upper_quantile(upper);
  }
  if (k == m) throw TailTooThinError("Monte Carlo target has an empty tail");
  return sum / static_cast<double>(m - k);
}

double iid_tail_average(const InnovationScenario& scenario, double alpha, std::size_t m, Rng& rng) {
  auto draw = scenario.sampler();
  std::vector<double> sample(m);
  for (double& z : sample) z = draw(rng);
  return cvar_tail_average(sample, alpha);
}

}  // namespace

TargetValue cvar_target(const InnovationScenario& scenario, double alpha, std::size_t mc_size, std::uint64_t seed,
                        TargetMethod method) {
  require_level(alpha);
  if (method == TargetMethod::automatic) {
    method = scenario.tag() == ScenarioTag::normal ? TargetMethod::analytic : TargetMethod::stratified_mc;
  }

  TargetValue out;
  out.method = method;
  if (method == TargetMethod::analytic) {
    if (scenario.tag() != ScenarioTag::normal) {
      throw std::invalid_argument("analytic CVaR target is only available for the Normal scenario");
    }
    const boost::math::normal_distribution<double> standard(0.0, 1.0);
    const double q = boost::math::quantile(standard, alpha);
    out.value = boost::math::pdf(standard, q) / (1.0 - alpha);
    return out;
  }

  if (mc_size < kMinTargetDraws) {
    throw std::invalid_argument("Monte Carlo CVaR target needs at least " + std::to_string(kMinTargetDraws) +
                                " draws");
  }
  const std::size_t per_batch = mc_size / kTargetBatches;
  std::vector<double> batch(kTargetBatches);
  for (std::size_t b = 0; b < kTargetBatches; ++b) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    batch[b] = method == TargetMethod::stratified_mc ? stratified_tail_average(scenario, alpha, per_batch, rng)
                                                     : iid_tail_average(scenario, alpha, per_batch, rng);
  }
  const double mean = std::accumulate(batch.begin(), batch.end(), 0.0) / static_cast<double>(kTargetBatches);
  double ss = 0.0;
  for (double v : batch) ss += (v - mean) * (v - mean);
  out.value = mean;
  out.std_error = std::sqrt(ss / static_cast<double>(kTargetBatches - 1) / static_cast<double>(kTargetBatches));
  out.draws = per_batch * kTargetBatches;
  return out;
}

InnovationRisk estimate_innovation_risk(const Series& series, std::size_t p, std::span<const double> alphas,
                                        const RiskOptions& opts) {
  if (series.size() <= p + 10) {
    throw DataError("innovation risk needs more than " + std::to_string(p + 10) + " observations, got " +
                    std::to_string(series.size()));
  }
  return estimate_innovation_risk(build_lagged_design(series, p, false), alphas, opts);
}

InnovationRisk estimate_innovation_risk(const LaggedDesign& design, std::span<const double> alphas,
                                        const RiskOptions& opts) {
  InnovationRisk out;
  out.fit = fit_r_estimator(design, ScoreFn(opts.lambda), opts.solver);
  out.n_eff = design.rows();
  out.residuals = residuals(design, out.fit.slopes);
  if (opts.center_residuals) {
    const double mean = std::accumulate(out.residuals.begin(), out.residuals.end(), 0.0) /
                        static_cast<double>(out.residuals.size());
    for (double& r : out.residuals) r -= mean;
  }
  out.reports.reserve(alphas.size());
  for (double alpha : alphas) out.reports.push_back(cvar_min_form(out.residuals, alpha));
  return out;
}

}  // namespace arcvar
