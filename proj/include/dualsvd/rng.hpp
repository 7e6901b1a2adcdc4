#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dualsvd {

/// SplitMix64 step; the backbone of master-seed -> stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives an independent engine for (master_seed, stream_id). Streams with
/// distinct ids never share state, so Monte Carlo trials can run in any
/// order (or in parallel) and reproduce bit-identically.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ull * (stream_id + 1);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. std::normal_distribution is
/// implementation-defined; this keeps byte-identical output across stdlibs.
inline double gaussian(std::mt19937_64& eng) {
  double u1 = uniform01(eng);
  double u2 = uniform01(eng);
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dualsvd
