#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace parkdet {

// Derives an independent seed for a named sub-stream so that all randomness
// in a run flows from one top-level seed. An FNV-style fold over the name,
// mixed with the base seed by splitmix64 finalization.
inline std::uint64_t substream_seed(std::uint64_t base, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 substream(std::uint64_t base, std::string_view name) {
  return std::mt19937_64(substream_seed(base, name));
}

}  // namespace parkdet
