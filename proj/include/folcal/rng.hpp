#pragma once

#include <cstdint>

namespace folcal {

/// splitmix64 finalizer; used to derive independent seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under a global seed. Streams are a pure function of
/// (seed, index), so a restart or chunk gets the same numbers no matter which
/// worker runs it.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull + 1));
}

}  // namespace folcal
