#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "arcvar/ingest.hpp"
#include "arcvar/quantile_regression.hpp"
#include "arcvar/rank_estimator.hpp"
#include "arcvar/risk.hpp"

namespace arcvar {

using Json = nlohmann::json;

inline constexpr std::string_view kToolName = "arcvar";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

inline constexpr std::string_view kRiskReportSchema = "arcvar.risk_report";
inline constexpr std::string_view kFitReportSchema = "arcvar.fit_report";
inline constexpr std::string_view kAnalysisReportSchema = "arcvar.analysis_report";

/// Tool name and version, RNG algorithm and (when given) the master seed.
Json metadata_json(std::optional<std::uint64_t> seed = std::nullopt);

Json to_json(const RiskReport& report);
Json to_json(const RFit& fit);
Json to_json(const ARQuantile& fit);
Json to_json(const TargetValue& target);

/// Risk report of a raw sample (fit absent, p = 0) or of AR residuals.
Json risk_report_json(std::string_view source, std::size_t p, std::size_t n_values,
                      std::span<const RiskReport> reports, const RFit* fit);

Json fit_report_json(std::string_view source, std::size_t n_eff, const RFit& fit);
Json fit_report_json(std::string_view source, std::size_t n_eff, const ARQuantile& fit);

Json analysis_report_json(const AnalysisReport& report);

}  // namespace arcvar
