#include "arcvar/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "arcvar/error.hpp"

namespace arcvar {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::size_t find_column(const std::vector<std::string>& header, std::string_view name, const std::string& file) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  const std::string wanted = lower(std::string(name));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == wanted) return i;
  }
  throw DataError(file + ": column '" + std::string(name) + "' not found in header");
}

}  // namespace

std::optional<Date> parse_date(std::string_view text, std::string_view format) {
  const std::string owned(trim(text));
  if (owned.empty()) return std::nullopt;
  std::tm tm{};
  tm.tm_mday = 1;
  std::istringstream in(owned);
  in >> std::get_time(&tm, std::string(format).c_str());
  if (in.fail()) return std::nullopt;
  const int next = in.peek();
  if (next != std::char_traits<char>::eof() && next != ' ' && next != 'T') return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{tm.tm_year + 1900}, month{static_cast<unsigned>(tm.tm_mon + 1)},
                           day{static_cast<unsigned>(tm.tm_mday)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

DailyCsv parse_daily_csv(const std::filesystem::path& path, std::string_view date_column,
                         std::string_view value_column, std::string_view date_format, char delimiter) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(file + ": cannot open file");

  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw DataError(file + ": file is empty");

  const std::vector<std::string> header = split_csv_line(line, delimiter);
  const std::size_t date_idx = find_column(header, date_column, file);
  const std::size_t value_idx = find_column(header, value_column, file);

  DailyCsv out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line, delimiter);
    if (date_idx >= fields.size()) {
      throw DataError(file + ":" + std::to_string(line_no) + ": row has no date field");
    }
    const std::optional<Date> date = parse_date(fields[date_idx], date_format);
    if (!date) {
      throw DataError(file + ":" + std::to_string(line_no) + ": cannot parse date '" + fields[date_idx] +
                      "' with format '" + std::string(date_format) + "'");
    }
    std::optional<double> value;
    if (value_idx < fields.size()) value = parse_number(fields[value_idx]);
    if (!value) ++out.missing_values;
    out.records.push_back({*date, value});
  }
  if (out.records.empty()) throw DataError(file + ": no data rows");

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    if (out.records[i].date == out.records[i - 1].date) {
      throw DataError(file + ": duplicated date " + format_date(out.records[i].date));
    }
  }
  return out;
}

Series read_series_csv(const std::filesystem::path& path, std::string_view column, char delimiter) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(file + ": cannot open file");

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (rows.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) rows.push_back(split_csv_line(line, delimiter));
  }
  if (rows.empty()) throw DataError(file + ": file is empty");

  const bool has_header = !parse_number(rows.front().back()).has_value();
  std::size_t idx = 0;
  std::size_t first = 0;
  if (has_header) {
    const auto& header = rows.front();
    if (!column.empty()) {
      idx = find_column(header, column, file);
    } else {
      idx = header.size() - 1;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "value") idx = i;
      }
    }
    first = 1;
  } else if (!column.empty()) {
    throw DataError(file + ": column '" + std::string(column) + "' requested but the file has no header");
  }

  std::vector<double> values;
  values.reserve(rows.size() - first);
  for (std::size_t r = first; r < rows.size(); ++r) {
    const std::optional<double> v = idx < rows[r].size() ? parse_number(rows[r][idx]) : std::nullopt;
    if (!v) throw DataError(file + ":" + std::to_string(r + 1) + ": missing or non-numeric value");
    values.push_back(*v);
  }
  if (values.empty()) throw DataError(file + ": no data rows");
  return Series(std::move(values), path.stem().string());
}

std::vector<Segment> transform_log1p(std::span<const DailyRecord> records) {
  std::vector<Segment> segments;
  std::vector<double> values;
  std::vector<Date> dates;
  auto flush = [&] {
    if (!values.empty()) segments.push_back({Series(std::move(values)), std::move(dates)});
    values = {};
    dates = {};
  };
  for (const DailyRecord& rec : records) {
    if (!dates.empty() && rec.date - dates.back() != std::chrono::days{1}) flush();
    if (!rec.value) {
      flush();
      continue;
    }
    if (*rec.value < 0.0) {
      throw DataError("negative value " + std::to_string(*rec.value) + " on " + format_date(rec.date));
    }
    values.push_back(std::log1p(*rec.value));
    dates.push_back(rec.date);
  }
  flush();
  return segments;
}

AnalysisReport analyze(std::span<const DailyRecord> records, const AnalysisOptions& opts) {
  if (records.empty()) throw DataError("no records to analyse");
  const std::vector<Segment> segments = transform_log1p(records);
  const std::size_t p = opts.p;
  const bool long_enough =
      std::any_of(segments.begin(), segments.end(), [&](const Segment& s) { return s.series.size() > p + 30; });
  if (!long_enough) {
    throw DataError("insufficient data: need a gap-free run of more than " + std::to_string(p + 30) + " days");
  }

  std::vector<LaggedDesign> parts;
  std::vector<Date> row_dates;
  for (const Segment& seg : segments) {
    if (seg.series.size() <= p) continue;
    parts.push_back(build_lagged_design(seg.series, p, false));
    row_dates.insert(row_dates.end(), seg.dates.begin() + static_cast<std::ptrdiff_t>(p), seg.dates.end());
  }
  const LaggedDesign design = stack_designs(parts);

  RiskOptions risk_opts;
  risk_opts.lambda = opts.lambda;
  risk_opts.solver = opts.solver;
  const InnovationRisk risk = estimate_innovation_risk(design, opts.alphas, risk_opts);

  AnalysisReport report;
  report.gauge = opts.gauge;
  report.period_start = records.front().date;
  report.period_end = records.back().date;
  report.p = p;
  report.n_eff = design.rows();
  report.records = records.size();
  report.missing_values =
      static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const DailyRecord& r) { return !r.value; }));
  report.segments_used = parts.size();
  report.phi_hat = risk.fit.slopes;
  report.lambda = opts.lambda;
  report.risk = risk.reports;
  report.flag_level = opts.flag_level;
  report.var_flag = var_hat(risk.residuals, opts.flag_level);
  report.fit = risk.fit;
  for (std::size_t t = 0; t < risk.residuals.size(); ++t) {
    if (risk.residuals[t] > report.var_flag) {
      report.exceedances.push_back({row_dates[t], risk.residuals[t], design.responses(static_cast<Eigen::Index>(t))});
    }
  }
  return report;
}

}  // namespace arcvar
