#pragma once

#include <cmath>
#include <cstdint>

namespace dadg::rng {

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                         std::uint64_t index) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ trial);
  h = mix(h ^ step);
  h = mix(h ^ index);
  return h;
}

// Uniform in (0, 1]; never zero, so log() below is safe.
inline double uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                      std::uint64_t index) {
  return (static_cast<double>(key(seed, trial, step, index) >> 11) + 1.0) * 0x1.0p-53;
}

// Counter-based standard normal: stateless Box-Muller keyed by
// (seed, trial, step, draw index). Trials and steps can be evaluated in any
// order on any number of threads and still see the same stream.
inline double standard_normal(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                              std::uint64_t index) {
  const double u1 = uniform(seed, trial, step, 2 * index);
  const double u2 = uniform(seed, trial, step, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace dadg::rng
