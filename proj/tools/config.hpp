#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace semrad::cli {

/// Flat `section.key -> value` configuration with strict, typed access.
///
/// Every getter marks its key as used; `finish` rejects keys nobody asked
/// for. All errors are ConfigError and name the key path.
class Config {
public:
  /// `section.key = value` lines, or a JSON object of sections when the first
  /// non-blank character is '{'.
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  /// Applies `section.key=value`.
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback);
  std::string text(const std::string& key);  ///< required
  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     const std::string& fallback);
  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  std::optional<double> maybe_number(const std::string& key);
  /// Strictly positive value.
  double positive(const std::string& key, double fallback);
  double positive(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool flag(const std::string& key, bool fallback);
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  /// Comma-separated integers; `a-b` expands to a range.
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);

  /// Throws for keys that were supplied but never read.
  void finish(const std::string& command) const;

  /// Every key read so far with its resolved value, sorted.
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

private:
  std::optional<std::string> raw(const std::string& key);
  void record(const std::string& key, const std::string& value);

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace semrad::cli
