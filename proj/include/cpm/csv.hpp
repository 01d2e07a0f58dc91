#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cpm {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws UsageError when absent.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180 subset: fields containing ',', '"' or newlines are quoted.
std::string format_csv(const CsvTable& table);
/// Inverse of format_csv.  Throws UsageError on ragged rows.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// `digits` significant digits (%g style); "inf", "-inf", "nan" for
/// non-finite values.
std::string format_double(double value, int digits = 17);

}  // namespace cpm
