#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "mobinfer/errors.hpp"

namespace mobinfer {

// Shortest round-trip representation (std::to_chars). Every file writer goes
// through this so identical runs produce byte-identical output and a saved
// trace reloads to the exact same doubles.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

// Strict full-token parses; reject trailing garbage. Locale-independent.
inline double parse_double(std::string_view token, long line = 0) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || token.empty()) {
    throw ParseError("expected a number, got '" + std::string(token) + "'",
                     line);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view token, long line = 0) {
  std::int64_t v = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || token.empty()) {
    throw ParseError("expected an integer, got '" + std::string(token) + "'",
                     line);
  }
  return v;
}

// Node ids are 32-bit; reject values a narrowing cast would alias.
inline std::int32_t parse_node_id(std::string_view token, long line = 0) {
  const std::int64_t v = parse_int(token, line);
  if (v < 0 || v > 0x7fffffff) {
    throw ParseError("node id out of range: '" + std::string(token) + "'",
                     line);
  }
  return static_cast<std::int32_t>(v);
}

}  // namespace mobinfer
