#include "afc/config.hpp"

#include "afc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace afc {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view view(raw);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    std::string body = trim(view);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": missing key");
    if (value.empty()) {
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "' has no value");
    }
    auto [it, inserted] = cfg.entries_.emplace(key, Entry{value, line});
    if (!inserted) {
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key +
                        "' repeats line " + std::to_string(it->second.line));
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse(in, path);
}

void KeyValueConfig::restrict_to(const std::vector<std::string_view>& allowed) const {
  // Report in line order so the first offending line is named.
  std::vector<std::pair<int, std::string>> unknown;
  for (const auto& [key, entry] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) unknown.emplace_back(entry.line, key);
  }
  if (unknown.empty()) return;
  std::sort(unknown.begin(), unknown.end());
  fail(unknown.front().second, "unknown key");
}

std::string KeyValueConfig::where(const std::string& key) const {
  auto it = entries_.find(key);
  std::string loc = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
  return loc + ": key '" + key + "'";
}

void KeyValueConfig::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(where(key) + ": " + what);
}

std::optional<double> KeyValueConfig::number(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  auto v = parse_double(it->second.value);
  if (!v) fail(key, "expected a number, got '" + it->second.value + "'");
  return v;
}

double KeyValueConfig::number(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

double KeyValueConfig::required_number(const std::string& key) const {
  auto v = number(key);
  if (!v) fail(key, "is required");
  return *v;
}

std::optional<int> KeyValueConfig::integer(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  const std::string& s = it->second.value;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
  return v;
}

int KeyValueConfig::integer(const std::string& key, int fallback) const {
  return integer(key).value_or(fallback);
}

bool KeyValueConfig::flag(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(key, "expected true or false, got '" + s + "'");
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

std::string KeyValueConfig::choice(const std::string& key, const std::vector<std::string>& choices,
                                   const std::string& fallback) const {
  std::string v = text(key, fallback);
  if (std::find(choices.begin(), choices.end(), v) != choices.end()) return v;
  std::string list;
  for (const auto& c : choices) list += (list.empty() ? "" : "|") + c;
  fail(key, "expected one of " + list + ", got '" + v + "'");
}

std::vector<double> KeyValueConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  std::stringstream ss(it->second.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_double(trim(item));
    if (!v) fail(key, "expected comma-separated numbers, got '" + it->second.value + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace afc
