#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pdbench/process_tree.hpp"
#include "pdbench/random.hpp"

namespace pdbench {

/// Order of the construct probabilities: sequence, exclusive, parallel,
/// inclusive, loop.
using ConstructProbs = std::array<double, 5>;

enum class Construct : std::size_t { sequence, exclusive, parallel, inclusive, loop };

/// Parameters of a population of random process trees.
struct PopulationSpec {
  std::size_t size_min = 10;
  std::size_t size_mode = 20;
  std::size_t size_max = 30;
  // Unnormalized; these three normalize to roughly 0.46 / 0.35 / 0.19.
  double p_seq = 0.95;
  double p_xor = 0.74;
  double p_and = 0.40;
  double p_or = 0.0;
  double p_loop = 0.0;
  double p_silent = 0.0;
  double p_duplicate = 0.0;
  double p_ltdep = 0.0;
  bool infrequent_paths = false;
  /// Exit probability given to generated loops.
  double loop_exit_prob = 0.5;

  ConstructProbs raw_construct_probs() const {
    return {p_seq, p_xor, p_and, p_or, p_loop};
  }
  /// Throws InfeasibleSpec when a parameter is out of range.
  void validate() const;
};

/// Divides by the sum. Throws AllZero when every entry is zero and
/// std::invalid_argument on negative entries.
ConstructProbs normalize_construct_probs(const ConstructProbs& raw);

/// Triangular(min, mode, max) draw, rounded to nearest and clamped.
std::size_t sample_size(const PopulationSpec& spec, Rng& rng);

ProcessTree generate_tree(const PopulationSpec& spec, Rng& rng);

/// `count` independent trees; tree i is drawn from its own stream derived
/// from `seed` and i.
std::vector<ProcessTree> sample_models(const PopulationSpec& spec, std::size_t count,
                                       std::uint64_t seed);

/// Spreadsheet-style activity names: a, b, ..., z, aa, ab, ...
std::string activity_name(std::size_t index);

}  // namespace pdbench
