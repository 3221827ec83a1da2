#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankforge {

// `key = value` lines; '#' starts a comment; blank lines ignored.
// Later assignments override earlier ones.
class FlatConfig {
 public:
  static FlatConfig Parse(std::istream& in, std::string_view source = "<config>");
  static FlatConfig Load(const std::string& path);

  void Set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  // Applies "key=value" overrides.
  void Override(const std::vector<std::string>& assignments);

  bool Has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> Get(const std::string& key) const;
  std::string Require(const std::string& key) const;

  std::string GetString(const std::string& key, std::string fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const;
  std::vector<std::string> GetList(const std::string& key, std::vector<std::string> fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string Trim(std::string_view s);

}  // namespace rankforge
