#pragma once

#include <cstdint>

namespace stplogic::detail {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent stream per (seed, index): hashed far apart so streams do not
// overlap within any realistic draw count.
inline SplitMix64 seeded_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64{mix64(seed ^ mix64(0x9e3779b97f4a7c15ull * (index + 1)))};
}

}  // namespace stplogic::detail
