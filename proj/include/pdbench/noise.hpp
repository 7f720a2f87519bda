#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/petri_net.hpp"
#include "pdbench/process_tree.hpp"
#include "pdbench/random.hpp"
#include "pdbench/replay.hpp"

namespace pdbench {

enum class NoiseType { add, duplicate, remove, swap_consecutive, swap_random };

inline constexpr std::array<NoiseType, 5> kNoiseTypes = {
    NoiseType::add, NoiseType::duplicate, NoiseType::remove, NoiseType::swap_consecutive,
    NoiseType::swap_random};

const char* to_string(NoiseType t);
bool noise_applicable(NoiseType type, const Trace& trace, std::size_t alphabet_size);

/// Applies exactly one edit. `alphabet` is the model's visible label set (only
/// used by `add`). Throws Inapplicable when the trace is too short.
Trace apply_noise_once(const Trace& trace, NoiseType type,
                       const std::vector<std::string>& alphabet, Rng& rng);

struct NoiseOptions {
  /// Per-type probability of firing in a round.
  double noise_prob = 1.0 / 3.0;
  std::size_t max_rounds = 5;
  ReplayOptions replay;
};

struct NoisedTrace {
  Trace trace;           // provenance = noised
  Trace source;          // fitting trace it was derived from
  std::size_t rounds = 0;  // edit rounds applied, 1..max_rounds
};

/// Turns every input trace into a trace the ground-truth net rejects. Each
/// round fires every noise type independently with probability noise_prob
/// (one uniformly chosen applicable type is forced if none fires) and then
/// re-checks fitness. A trace that still fits after max_rounds is discarded
/// and a fresh trace drawn from `pool` goes through the same procedure with
/// its own round budget. Throws PoolExhausted when the pool runs dry.
std::vector<NoisedTrace> make_nonfitting(const std::vector<Trace>& test_half,
                                         const std::vector<Trace>& pool,
                                         const PetriNet& ground_truth,
                                         const std::vector<std::string>& alphabet,
                                         const NoiseOptions& options, Rng& rng);

/// Convenience overload compiling the ground truth from its tree.
std::vector<NoisedTrace> make_nonfitting(const std::vector<Trace>& test_half,
                                         const std::vector<Trace>& pool,
                                         const ProcessTree& tree,
                                         const NoiseOptions& options, Rng& rng);

}  // namespace pdbench
