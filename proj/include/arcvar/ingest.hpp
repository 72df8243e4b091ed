#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arcvar/ar_model.hpp"
#include "arcvar/rank_estimator.hpp"
#include "arcvar/risk.hpp"

namespace arcvar {

using Date = std::chrono::sys_days;

/// strftime-style format; trailing time-of-day text after a space or 'T' is ignored.
std::optional<Date> parse_date(std::string_view text, std::string_view format = "%Y-%m-%d");

/// ISO-8601 calendar date.
std::string format_date(Date date);

struct DailyRecord {
  Date date;
  std::optional<double> value;  // nullopt marks a missing observation
};

struct DailyCsv {
  std::vector<DailyRecord> records;  // strictly increasing dates
  std::size_t missing_values = 0;    // empty or unparseable value cells
};

/// Reads a headed CSV of daily values. Throws DataError for an empty file,
/// missing columns, unparseable dates and duplicated dates (the message names
/// the date).
DailyCsv parse_daily_csv(const std::filesystem::path& path, std::string_view date_column,
                         std::string_view value_column, std::string_view date_format = "%Y-%m-%d",
                         char delimiter = ',');

/// One numeric column of a CSV as a Series. With a header the column is
/// `column`, or "value", or else the last one; a headerless file must hold one
/// number per row. Throws DataError on empty or non-numeric cells.
Series read_series_csv(const std::filesystem::path& path, std::string_view column = {}, char delimiter = ',');

/// Run of consecutive calendar days with observed values.
struct Segment {
  Series series;
  std::vector<Date> dates;
};

/// log(1 + value), split into maximal runs at missing values and at skipped
/// calendar days. Throws DataError (naming the date) for negative values.
std::vector<Segment> transform_log1p(std::span<const DailyRecord> records);

struct AnalysisOptions {
  std::size_t p = 1;
  double lambda = kDefaultLambda;
  std::vector<double> alphas{0.95, 0.99};
  double flag_level = 0.99;
  std::string gauge;
  RSolverOptions solver;
};

struct Exceedance {
  Date date;
  double residual = 0.0;
  double value = 0.0;  // transformed observation on that date
};

struct AnalysisReport {
  std::string gauge;
  Date period_start;
  Date period_end;
  std::size_t p = 1;
  std::size_t n_eff = 0;
  std::size_t records = 0;
  std::size_t missing_values = 0;
  std::size_t segments_used = 0;
  std::vector<double> phi_hat;
  double lambda = kDefaultLambda;
  std::vector<RiskReport> risk;
  double flag_level = 0.99;
  double var_flag = 0.0;
  std::vector<Exceedance> exceedances;
  RFit fit;
};

/// Segment-pooled R-fit of the transformed series, raw-residual VaR/CVaR per
/// alpha, and the dates whose residual exceeds VaR at flag_level. No lagged row
/// spans a gap. Needs at least one segment longer than p + 30.
AnalysisReport analyze(std::span<const DailyRecord> records, const AnalysisOptions& opts = {});

}  // namespace arcvar
