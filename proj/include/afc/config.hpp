#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afc {

/// `key = value` text configuration. Blank lines and `#` comments are
/// ignored; keys may appear once. Every error names the source and line.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source);
  /// Throws ConfigError when the file cannot be opened.
  static KeyValueConfig load(const std::string& path);

  /// Throws ConfigError on the first key not in `allowed`.
  void restrict_to(const std::vector<std::string_view>& allowed) const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<double> number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  double required_number(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  /// Value restricted to `choices`.
  std::string choice(const std::string& key, const std::vector<std::string>& choices,
                     const std::string& fallback) const;
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& key) const;

  /// "source:line: key 'k'" for diagnostics.
  std::string where(const std::string& key) const;
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace afc
