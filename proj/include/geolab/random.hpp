#pragma once

#include "geolab/types.hpp"

#include <random>

namespace geolab {

// splitmix64 step; used to derive independent per-task seeds so results do
// not depend on scheduling order.
inline std::uint64_t mix_seed(std::uint64_t state, std::uint64_t salt) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(mix_seed(seed, salt));
}

inline Vec gaussian_vec(std::mt19937_64& rng, Index n) {
  std::normal_distribution<Real> normal(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// Uniform direction on the unit sphere of R^n.
inline Vec unit_sphere_sample(std::mt19937_64& rng, Index n) {
  while (true) {
    Vec v = gaussian_vec(rng, n);
    const Real s = v.norm();
    if (s > 1e-12) return v / s;
  }
}

}  // namespace geolab
