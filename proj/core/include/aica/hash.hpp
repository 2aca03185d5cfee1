#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aica {

// FNV-1a, the stable 64-bit hash used for prompt identities and prefix
// selection. Must stay platform-independent: fixture scripts and run logs
// store these values.
constexpr std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex16(std::uint64_t value);

inline std::string prompt_hash(std::string_view prompt) {
  return to_hex16(fnv1a64(prompt));
}

}  // namespace aica
