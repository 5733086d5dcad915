#pragma once

#include <stdexcept>
#include <string>

namespace bibliostat {

/// Bad input: malformed files, integrity violations, inconsistent config.
/// The CLI maps this to exit code 1; every other exception is a runtime error.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Formats "path:line: message" for line-precise diagnostics.
std::string at_line(const std::string& path, std::size_t line, const std::string& message);

}  // namespace bibliostat
