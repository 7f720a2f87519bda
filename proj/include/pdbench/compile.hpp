#pragma once

#include "pdbench/petri_net.hpp"
#include "pdbench/process_tree.hpp"

namespace pdbench {

/// Builds a trace-equivalent workflow net for `tree`.
///
/// Exclusive choices share their entry/exit places between branches, parallel
/// and inclusive operators use silent fork/join transitions (the inclusive
/// split has one silent transition per nonempty subset of children), loops
/// get a silent entry, a body/redo cycle and a silent exit. A long-term
/// dependency adds a pair of places (source branch taken / not taken) filled
/// by the source choice's branch-entry transitions and consumed by the target
/// choice's branch-entry transitions.
PetriNet compile_tree_to_net(const ProcessTree& tree);

}  // namespace pdbench
