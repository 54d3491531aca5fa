#pragma once

#include <cstdint>
#include <random>

namespace lkr {

// splitmix64 mixing step; used to derive independent stream seeds from a
// master seed without correlated low bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for stream `index` of a master seed.  Streams 0,1,2,... are used for
// noise realizations; large fixed tags keep auxiliary consumers (pair
// sampling, classical particles) out of the realization stream space.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

// Uniform draw on (0,1); never returns exactly 0 or 1.
inline double uniform_open(std::mt19937_64& rng) {
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  return u;
}

}  // namespace lkr
