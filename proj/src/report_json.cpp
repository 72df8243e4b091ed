#include "arcvar/report_json.hpp"

#include <cmath>

#include "arcvar/rng.hpp"

namespace arcvar {

namespace {

// Non-finite reals have no JSON representation.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(std::span<const double> v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json header(std::string_view schema) {
  return Json{{"schema", schema}, {"schema_version", kSchemaVersion}, {"metadata", metadata_json()}};
}

}  // namespace

Json metadata_json(std::optional<std::uint64_t> seed) {
  Json meta{{"tool", kToolName}, {"version", kToolVersion}, {"rng", kRngAlgorithm}};
  if (seed) meta["seed"] = *seed;
  return meta;
}

Json to_json(const RiskReport& report) {
  return Json{{"alpha", report.alpha},
              {"var_hat", number(report.var_hat)},
              {"cvar_hat", number(report.cvar_hat)},
              {"n_eff", report.n_eff},
              {"method", to_string(report.method)},
              {"xi_star", number(report.xi_star)}};
}

Json to_json(const RFit& fit) {
  return Json{{"slopes", numbers(fit.slopes)},
              {"lambda", fit.lambda},
              {"solver", to_string(fit.method)},
              {"dispersion_at_min", number(fit.dispersion_at_min)},
              {"dispersion_at_start", number(fit.dispersion_at_start)},
              {"trace",
               {{"iterations", fit.trace.iterations},
                {"restarts", fit.trace.restarts},
                {"subgradient_gap", number(fit.trace.subgradient_gap)}}}};
}

Json to_json(const ARQuantile& fit) {
  return Json{{"alpha", fit.alpha},
              {"coeffs", numbers(fit.coeffs)},
              {"objective", number(fit.objective)},
              {"neg_count", fit.neg_count},
              {"zero_count", fit.zero_count},
              {"pos_count", fit.pos_count},
              {"pivots", fit.pivots}};
}

Json to_json(const TargetValue& target) {
  return Json{{"value", number(target.value)},
              {"std_error", number(target.std_error)},
              {"draws", target.draws},
              {"method", to_string(target.method)}};
}

Json risk_report_json(std::string_view source, std::size_t p, std::size_t n_values,
                      std::span<const RiskReport> reports, const RFit* fit) {
  Json out = header(kRiskReportSchema);
  out["source"] = source;
  out["p"] = p;
  out["n_values"] = n_values;
  out["n_eff"] = reports.empty() ? 0 : reports.front().n_eff;
  out["fit"] = fit ? to_json(*fit) : Json(nullptr);
  Json risk = Json::array();
  for (const RiskReport& r : reports) risk.push_back(to_json(r));
  out["risk"] = std::move(risk);
  return out;
}

Json fit_report_json(std::string_view source, std::size_t n_eff, const RFit& fit) {
  Json out = header(kFitReportSchema);
  out["source"] = source;
  out["method"] = "r";
  out["p"] = fit.slopes.size();
  out["n_eff"] = n_eff;
  out["r_fit"] = to_json(fit);
  return out;
}

Json fit_report_json(std::string_view source, std::size_t n_eff, const ARQuantile& fit) {
  Json out = header(kFitReportSchema);
  out["source"] = source;
  out["method"] = "arq";
  out["p"] = fit.coeffs.empty() ? 0 : fit.coeffs.size() - 1;
  out["n_eff"] = n_eff;
  out["ar_quantile"] = to_json(fit);
  return out;
}

Json analysis_report_json(const AnalysisReport& report) {
  Json out = header(kAnalysisReportSchema);
  out["gauge"] = report.gauge;
  out["period"] = {{"start", format_date(report.period_start)}, {"end", format_date(report.period_end)}};
  out["p"] = report.p;
  out["n_eff"] = report.n_eff;
  out["records"] = report.records;
  out["missing_values"] = report.missing_values;
  out["segments_used"] = report.segments_used;
  out["phi_hat"] = numbers(report.phi_hat);
  out["lambda"] = report.lambda;
  Json risk = Json::array();
  for (const RiskReport& r : report.risk) risk.push_back(to_json(r));
  out["risk"] = std::move(risk);
  out["flag_level"] = report.flag_level;
  out["var_flag"] = number(report.var_flag);
  Json dates = Json::array();
  Json rows = Json::array();
  for (const Exceedance& e : report.exceedances) {
    dates.push_back(format_date(e.date));
    rows.push_back({{"date", format_date(e.date)}, {"residual", number(e.residual)}, {"value", number(e.value)}});
  }
  out["exceedance_dates"] = std::move(dates);
  out["exceedances"] = std::move(rows);
  out["fit"] = to_json(report.fit);
  return out;
}

}  // namespace arcvar
