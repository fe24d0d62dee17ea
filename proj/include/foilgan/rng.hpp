#pragma once

#include <cstdint>
#include <random>

namespace foilgan {

using Rng = std::mt19937_64;

// Independent sub-seed per (seed, stream) via a SplitMix64 round.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream ids used across the pipeline.
enum class SeedStream : std::uint64_t {
  generator_init = 1,
  critic_init = 2,
  batches = 3,
  latent = 4,
  penalty = 5,
  sweep = 6,
  shuffle = 7,
};

inline Rng make_rng(std::uint64_t seed, SeedStream stream) {
  return Rng(derive_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace foilgan
