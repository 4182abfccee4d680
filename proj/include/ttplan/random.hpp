#pragma once

#include "ttplan/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ttplan {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream identified by `path` under `root`, so a
/// trial gets the same numbers whichever worker runs it.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(root);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline Vec3 gaussian3(Rng& rng, double sigma) {
  const double x = standard_normal(rng);
  const double y = standard_normal(rng);
  const double z = standard_normal(rng);
  return sigma * Vec3(x, y, z);
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace ttplan
