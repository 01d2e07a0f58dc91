#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cpm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

/// Runs the `cpm` tool.  `args` excludes the program name.  The first line
/// written to `out` is the JSON run header; tables follow unless --out
/// sends them to a file.  Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Schema the run header must satisfy.
const nlohmann::json& header_schema();

/// Checks `doc` against a JSON-schema subset (type, required, properties,
/// enum).  On failure returns false and describes the first problem.
bool validate(const nlohmann::json& doc, const nlohmann::json& schema, std::string* why = nullptr);

struct IdentityCheck {
  std::string name;
  unsigned cases = 0;
  unsigned failures = 0;
};

/// Exact identity suites: composition counts, exponential and factorial
/// weight closed forms, and the even-partition recurrence values.
std::vector<IdentityCheck> identity_report();

}  // namespace cpm::cli
