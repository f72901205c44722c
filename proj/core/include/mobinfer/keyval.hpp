#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mobinfer {

// Flat key=value files: one pair per line, '#' starts a comment, blank lines
// ignored. Used for generator/inference configs and report summaries.
// Insertion order is preserved on write; on read a repeated key keeps the
// last value.
class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues parse(std::istream& in);
  static KeyValues parse_file(const std::string& path);

  void set(std::string key, std::string value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);
  void set_bool(const std::string& key, bool value);

  bool contains(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  // Throw ConfigError when the key is missing or the value does not parse.
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::optional<double> get_double_opt(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace mobinfer
