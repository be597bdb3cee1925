#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ttc {

// FNV-1a, 64-bit. Stable across platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);

// Locale-independent double parsing; throws ttc::ParseError on garbage.
double parse_double(std::string_view token, std::string_view what);

// Shortest round-trip representation (std::to_chars), locale-independent.
std::string double_to_string(double value);

}  // namespace ttc
