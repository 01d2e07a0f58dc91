#pragma once

#include <stdexcept>
#include <string>

namespace cpm {

// Exit code contract of the command-line tool: usage 2, domain 3, I/O 4.

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numeric or domain failure inside a module (bad parameter range, saddle
/// not found, cancellation guard tripped, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cpm
