#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "pdbench/process_tree.hpp"

namespace pdbench {

using Sequence = std::vector<std::string>;

struct BoundedLanguage {
  std::set<Sequence> traces;
  /// Set when a loop was cut at the unroll cap or the trace cap was hit.
  bool truncated = false;
};

/// Enumerates the distinct visible traces of `tree` with every loop taking at
/// most `max_loop_unroll` redo iterations. Long-term dependencies are honoured.
/// For loop-free trees that stay under `max_traces` this is the exact language.
BoundedLanguage tree_language_bounded(const ProcessTree& tree,
                                      std::size_t max_loop_unroll,
                                      std::size_t max_traces);

}  // namespace pdbench
