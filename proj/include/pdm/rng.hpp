#pragma once

#include <cstdint>
#include <random>

namespace pdm {

using Rng = std::mt19937_64;

// SplitMix64 finalizer over (seed, stream). Every independent replicate
// (null model, restart, trial) draws its own stream, so results do not
// depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

} // namespace pdm
