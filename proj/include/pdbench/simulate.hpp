#pragma once

#include <cstddef>

#include "pdbench/event_log.hpp"
#include "pdbench/process_tree.hpp"
#include "pdbench/random.hpp"

namespace pdbench {

struct SimulationOptions {
  /// Hard cap on redo iterations per loop execution.
  std::size_t max_loop_iterations = 10;
  /// Prefix of generated case ids.
  std::string case_prefix = "case";
};

/// Random walks of the tree. Exclusive branches are drawn by weight,
/// inclusive subsets with probability proportional to the product of the
/// mean-normalized weights of the chosen children, parallel branches are
/// interleaved by picking uniformly among the currently enabled leaves, and
/// loops redo with probability 1 - exit_prob until the iteration cap.
EventLog simulate_log(const ProcessTree& tree, std::size_t n_traces, Rng& rng,
                      const SimulationOptions& options = {});

struct Completeness {
  double ratio = 0.0;
  /// The model language was truncated, so the ratio is approximate.
  bool lower_bound = false;
  std::size_t language_size = 0;
  std::size_t observed = 0;
};

/// Share of the (bounded) model language observed in the log. Throws
/// EmptyLanguage when the enumeration yields nothing.
Completeness completeness(const EventLog& log, const ProcessTree& tree,
                          std::size_t max_loop_unroll = 2,
                          std::size_t max_traces = 100000);

}  // namespace pdbench
