#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace cxnet {

// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::uint64_t x) { return std::to_string(x); }

}  // namespace cxnet
