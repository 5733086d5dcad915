#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bibliostat::text {

/// Trim, collapse runs of Unicode whitespace to one space, and NFC-normalize.
std::string normalize_display_name(std::string_view raw);

/// Strip combining marks (after NFD), lowercase, trim and collapse whitespace.
std::string fold_diacritics_lower(std::string_view raw);

/// Unicode-aware lowercase.
std::string to_lower(std::string_view raw);

/// Splits on single spaces; input is expected to be collapsed already.
std::vector<std::string> split_words(std::string_view collapsed);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// True for one letter, optionally followed by a period ("j", "j.", "ł.").
bool is_initial(std::string_view token);

/// Number of Unicode code points; invalid sequences count per byte.
std::size_t code_point_count(std::string_view s);

}  // namespace bibliostat::text
