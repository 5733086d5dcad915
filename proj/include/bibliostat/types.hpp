#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace bibliostat {

enum class Gender { male, female, unknown };

std::string_view to_string(Gender g);

/// Parses "male"/"female" (case-insensitive). Anything else yields nullopt.
std::optional<Gender> parse_binary_gender(std::string_view token);

/// Canonical author name -> gender. Names not present resolve to unknown.
class GenderTable {
 public:
  void set(const std::string& name, Gender g) { labels_[name] = g; }
  Gender lookup(const std::string& name) const {
    auto it = labels_.find(name);
    return it == labels_.end() ? Gender::unknown : it->second;
  }
  bool contains(const std::string& name) const { return labels_.contains(name); }
  std::size_t size() const { return labels_.size(); }
  const std::map<std::string, Gender>& entries() const { return labels_; }

 private:
  std::map<std::string, Gender> labels_;
};

}  // namespace bibliostat
