#include "bibliostat/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace bibliostat::text {
namespace {

const icu::Normalizer2& normalizer(bool compose) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n =
      compose ? icu::Normalizer2::getNFCInstance(status) : icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString normalized(std::string_view raw, bool compose) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<std::int32_t>(raw.size())));
  icu::UnicodeString out = normalizer(compose).normalize(in, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU normalization failed");
  }
  return out;
}

// Collapses whitespace and optionally drops nonspacing marks.
std::string collapse(const icu::UnicodeString& s, bool drop_marks) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (std::int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (drop_marks && u_charType(c) == U_NON_SPACING_MARK) {
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(u' '));
      pending_space = false;
    }
    out.append(c);
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

}  // namespace

std::string normalize_display_name(std::string_view raw) {
  return collapse(normalized(raw, true), false);
}

std::string fold_diacritics_lower(std::string_view raw) {
  icu::UnicodeString decomposed = normalized(raw, false);
  decomposed.toLower(icu::Locale::getRoot());
  return collapse(decomposed, true);
}

std::string to_lower(std::string_view raw) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<std::int32_t>(raw.size())));
  s.toLower(icu::Locale::getRoot());
  std::string result;
  s.toUTF8String(result);
  return result;
}

std::vector<std::string> split_words(std::string_view collapsed) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < collapsed.size()) {
    std::size_t end = collapsed.find(' ', start);
    if (end == std::string_view::npos) {
      end = collapsed.size();
    }
    if (end > start) {
      words.emplace_back(collapsed.substr(start, end - start));
    }
    start = end + 1;
  }
  return words;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) {
      out.append(sep);
    }
    out.append(parts[i]);
  }
  return out;
}

bool is_initial(std::string_view token) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(token.data());
  const auto length = static_cast<std::int32_t>(token.size());
  std::int32_t i = 0;
  UChar32 c = 0;
  U8_NEXT(bytes, i, length, c);
  if (c < 0 || !u_isalpha(c)) {
    return false;
  }
  return i == length || (i + 1 == length && token[static_cast<std::size_t>(i)] == '.');
}

std::size_t code_point_count(std::string_view s) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::size_t count = 0;
  for (std::int32_t i = 0; i < length;) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    ++count;
  }
  return count;
}

}  // namespace bibliostat::text
