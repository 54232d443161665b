#pragma once

// Internal CSV and file helpers. Not installed.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace corrdyn::detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a comma-separated UTF-8 file with a mandatory header row.
/// Blank lines are skipped; trailing '\r' is stripped.
CsvTable read_csv(const std::filesystem::path& path);

/// Parses a decimal number; `context` prefixes the error on failure.
double parse_double(std::string_view text, const std::string& context);

/// Shortest representation that round-trips exactly (std::to_chars).
std::string format_double(double value);

/// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

}  // namespace corrdyn::detail
