#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

// Text helpers shared by exporters: shortest-round-trip float formatting (so
// identical inputs produce byte-identical files) and FNV-1a hashing for input
// provenance fields in run reports.

namespace ionweave {

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace ionweave
