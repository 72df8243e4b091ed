#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arcvar {

/// Runs one command line given without the program name and returns the exit
/// code (see ExitCode). Diagnostics go to `err` as "ERROR[<code>]: <message>".
///
/// Subcommands: simulate, fit, risk, bench, analyze. Global options: --seed,
/// --config, --out-dir, --format {csv,json,text}.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat key=value pairs in file order. Blank lines, '#'/';' comments and
/// [section] headers are skipped; surrounding quotes on values are removed.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace arcvar
