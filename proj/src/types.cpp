#include "bibliostat/error.hpp"
#include "bibliostat/types.hpp"

#include <algorithm>
#include <cctype>

namespace bibliostat {

std::string at_line(const std::string& path, std::size_t line, const std::string& message) {
  return path + ":" + std::to_string(line) + ": " + message;
}

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::male:
      return "male";
    case Gender::female:
      return "female";
    case Gender::unknown:
      return "unknown";
  }
  return "unknown";
}

std::optional<Gender> parse_binary_gender(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "male") {
    return Gender::male;
  }
  if (lower == "female") {
    return Gender::female;
  }
  return std::nullopt;
}

}  // namespace bibliostat
