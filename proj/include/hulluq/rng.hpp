#pragma once

#include <cmath>
#include <cstdint>

namespace hulluq {

/// SplitMix64 step; the project-wide seed mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform double in [0,1). Hand-rolled instead of
/// std::uniform_real_distribution so streams are identical across
/// standard library implementations.
inline double next_uniform(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on the deterministic uniform stream.
inline double next_normal(std::uint64_t& state) {
  double u1 = next_uniform(state);
  while (u1 == 0.0) u1 = next_uniform(state);
  const double u2 = next_uniform(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace hulluq
