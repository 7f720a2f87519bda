#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace pdbench {

using Rng = std::mt19937_64;

/// Position of a random stream inside an experiment.
struct SeedPath {
  std::string cell;
  std::string miner;
  std::uint64_t model_index = 0;
  std::string stage;
};

/// Deterministic seed derivation: each path component is absorbed through a
/// SplitMix64 finalizer, so equal paths give equal seeds and distinct paths
/// give (with overwhelming probability) distinct seeds.
std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path);

inline Rng make_rng(std::uint64_t master, const SeedPath& path) {
  return Rng(derive_seed(master, path));
}

/// Uniform real in [0, 1) drawn with a fixed recipe (53 random bits) so
/// simulated data does not depend on the standard library's distributions.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) via rejection sampling. n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Fisher-Yates shuffle built on uniform_index.
template <typename Container>
void shuffle_in_place(Container& c, Rng& rng) {
  for (std::size_t i = c.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(c[i - 1], c[j]);
  }
}

}  // namespace pdbench
