#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/petri_net.hpp"

namespace pdbench {

enum class ReplayVerdict { fits, not_fits, budget_exceeded };

const char* to_string(ReplayVerdict v);

struct ReplayOptions {
  /// Markings with more tokens than this on any place are pruned.
  std::uint32_t token_bound = 8;
  /// Maximum number of (marking, position) states visited per trace.
  std::size_t state_budget = 200000;
};

/// Exact replay: a trace fits iff some firing sequence from the initial to
/// the final marking projects onto it, with silent transitions interleaved
/// freely and duplicate labels resolved nondeterministically.
///
/// The search advances one event at a time over the set of markings
/// reachable through silent moves, so the visited states are exactly the
/// distinct (marking, position) pairs. Exploration order is fixed, which makes
/// a verdict reached under budget b identical under any larger budget.
class ReplayEngine {
 public:
  /// Throws InvalidNet if the net fails validation.
  explicit ReplayEngine(const PetriNet& net, ReplayOptions options = {});

  ReplayVerdict replay(std::span<const std::string> events) const;
  ReplayVerdict replay(const Trace& trace) const { return replay(trace.events); }

  /// Whether some firing sequence from the initial marking projects onto
  /// `prefix` (final marking not required). budget_exceeded if undecided.
  ReplayVerdict viable_prefix(std::span<const std::string> prefix) const;

  const ReplayOptions& options() const noexcept { return options_; }

 private:
  using Key = std::basic_string<std::uint8_t>;

  struct Arcs {
    std::vector<std::uint32_t> inputs;
    std::vector<std::uint32_t> outputs;
  };

  ReplayVerdict run(std::span<const std::string> events, bool require_final) const;
  bool closure(std::vector<Key>& layer, std::size_t& visited) const;
  bool fire(const Key& from, const Arcs& t, Key& to) const;

  ReplayOptions options_;
  std::vector<Arcs> silent_;
  std::unordered_map<std::string, std::vector<Arcs>> visible_;
  Key initial_;
  Key final_;
  bool initial_over_bound_ = false;
};

ReplayVerdict replay_fits(const PetriNet& net, const Trace& trace,
                          const ReplayOptions& options = {});

}  // namespace pdbench
