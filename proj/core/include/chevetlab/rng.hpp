#pragma once

#include <cstdint>
#include <random>

namespace chevetlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `stream` under `master`. Trial t of any Monte Carlo loop
/// draws from derive_seed(master, t), so results do not depend on which
/// worker ran the trial.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

Rng substream(std::uint64_t master, std::uint64_t stream);

/// Uniform in (0, 1]; never returns zero so logarithms stay finite.
inline double uniform_open0(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace chevetlab
