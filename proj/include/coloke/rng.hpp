#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace coloke::rng {

// splitmix64 finalizer; used to derive independent named streams from one
// top-level seed so that adding a consumer never shifts another's draws.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(seed ^ mix(stream));
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  return derive(seed, fnv1a(tag));
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t stream) {
  return derive(derive(seed, tag), stream);
}

// portable uniform double in [0,1) from the top 53 bits
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

}  // namespace coloke::rng
