#include "mobinfer/keyval.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "mobinfer/errors.hpp"
#include "mobinfer/num_format.hpp"

namespace mobinfer {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in) {
  KeyValues kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key=value", lineno);
    }
    std::string key(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", lineno);
    kv.set(std::move(key), std::move(value));
  }
  return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse(in);
}

void KeyValues::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValues::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void KeyValues::set_int(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void KeyValues::set_bool(const std::string& key, bool value) {
  set(key, value ? "true" : "false");
}

bool KeyValues::contains(const std::string& key) const {
  return get(key).has_value();
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValues::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  return *v;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_double(*v);
  } catch (const ParseError&) {
    throw ConfigError("key '" + key + "': not a number: '" + *v + "'");
  }
}

std::int64_t KeyValues::get_int(const std::string& key,
                                std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_int(*v);
  } catch (const ParseError&) {
    throw ConfigError("key '" + key + "': not an integer: '" + *v + "'");
  }
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + *v + "'");
}

std::optional<double> KeyValues::get_double_opt(const std::string& key) const {
  if (!contains(key)) return std::nullopt;
  return get_double(key, 0.0);
}

void KeyValues::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) {
    out << k << '=' << v << '\n';
  }
}

}  // namespace mobinfer
