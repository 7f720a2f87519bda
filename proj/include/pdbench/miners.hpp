#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/petri_net.hpp"
#include "pdbench/process_tree.hpp"

namespace pdbench {

struct MinerSpec {
  std::string name;
  std::map<std::string, std::string> parameters;

  bool operator==(const MinerSpec&) const = default;
};

/// Alpha+ : length-one loops are removed, the Alpha footprint is built on the
/// remaining log framed by artificial start and end activities (silent in
/// the net), with the length-two-loop refinement of the causality relation,
/// and each length-one-loop transition is reattached as a
/// self-loop on every place whose input set precedes it and whose output set
/// follows it. Throws MinerFailure when no activity survives the removal or
/// when the number of maximal place candidates exceeds an internal cap.
PetriNet miner_alpha_plus(const EventLog& training);

/// Process tree induced by the basic Inductive Miner (no noise filtering).
/// Cuts are tried in the order exclusive, sequence, parallel, loop; the
/// fall-through is a flower over the sublog alphabet.
ProcessTree inductive_tree(const EventLog& training);
PetriNet miner_inductive_basic(const EventLog& training);

/// Accepts every string over the training alphabet.
PetriNet miner_flower(const EventLog& training);

/// Accepts exactly the distinct training variants.
PetriNet miner_tracelog(const EventLog& training);

using MinerFn =
    std::function<PetriNet(const EventLog&, const std::map<std::string, std::string>&)>;

/// Name-addressed miner table. Entries without an implementation are reserved
/// names that fail on use.
class MinerRegistry {
 public:
  /// alpha_plus, inductive_basic, flower, tracelog; heuristics and ilp are
  /// reserved.
  static const MinerRegistry& builtin();

  void add(const std::string& name, MinerFn fn, std::set<std::string> parameters = {});
  void reserve(const std::string& name);

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  bool implemented(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws ConfigInvalid for an unknown name or an unsupported parameter.
  void check(const MinerSpec& spec) const;

  /// Runs the miner and validates its output. Any failure, including an
  /// empty training log, is reported as MinerFailure.
  PetriNet discover(const MinerSpec& spec, const EventLog& training) const;

 private:
  struct Entry {
    MinerFn fn;
    std::set<std::string> parameters;
  };
  std::map<std::string, Entry> entries_;
};

inline PetriNet discover(const MinerSpec& spec, const EventLog& training) {
  return MinerRegistry::builtin().discover(spec, training);
}

}  // namespace pdbench
