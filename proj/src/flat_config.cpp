#include "rankforge/flat_config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "rankforge/core.hpp"

namespace rankforge {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

FlatConfig FlatConfig::Parse(std::istream& in, std::string_view source) {
  FlatConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", source, line_no));
    }
    std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
    cfg.Set(std::move(key), Trim(std::string_view(trimmed).substr(eq + 1)));
  }
  return cfg;
}

FlatConfig FlatConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  return Parse(in, path);
}

void FlatConfig::Override(const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", a));
    std::string key = Trim(std::string_view(a).substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("override '{}' has an empty key", a));
    Set(std::move(key), Trim(std::string_view(a).substr(eq + 1)));
  }
}

std::optional<std::string> FlatConfig::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string FlatConfig::Require(const std::string& key) const {
  auto v = Get(key);
  if (!v || v->empty()) throw ConfigError(fmt::format("missing required key '{}'", key));
  return *v;
}

std::string FlatConfig::GetString(const std::string& key, std::string fallback) const {
  auto v = Get(key);
  return v ? *v : std::move(fallback);
}

double FlatConfig::GetDouble(const std::string& key, double fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError(fmt::format("key '{}': '{}' is not a number", key, *v));
  }
  return out;
}

std::int64_t FlatConfig::GetInt(const std::string& key, std::int64_t fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, *v));
  }
  return out;
}

std::vector<std::string> FlatConfig::GetList(const std::string& key, std::vector<std::string> fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  std::string_view rest = *v;
  while (true) {
    const auto comma = rest.find(',');
    std::string item = Trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace rankforge
