#include "pdbench/random.hpp"

#include <stdexcept>
#include <string_view>

namespace pdbench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t absorb(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

std::uint64_t absorb(std::uint64_t h, std::string_view s) {
  // Length first, so "ab"+"c" and "a"+"bc" differ.
  h = absorb(h, static_cast<std::uint64_t>(s.size()));
  std::uint64_t word = 0;
  std::size_t n = 0;
  for (unsigned char c : s) {
    word = (word << 8) | c;
    if (++n == 8) {
      h = absorb(h, word);
      word = 0;
      n = 0;
    }
  }
  if (n) h = absorb(h, word);
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path) {
  std::uint64_t h = splitmix64(master);
  h = absorb(h, path.cell);
  h = absorb(h, path.miner);
  h = absorb(h, path.model_index);
  h = absorb(h, path.stage);
  return h;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Largest multiple of n that fits; rejects the biased tail.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace pdbench
