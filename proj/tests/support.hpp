#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/petri_net.hpp"
#include "pdbench/process_tree.hpp"
#include "pdbench/replay.hpp"
#include "pdbench/tree_language.hpp"

namespace pdtest {

using pdbench::Sequence;

inline pdbench::ProcessTree tree(const std::string& text) { return pdbench::parse_tree(text); }

inline pdbench::EventLog log_of(const std::vector<Sequence>& seqs) {
  std::vector<pdbench::Trace> traces;
  for (std::size_t i = 0; i < seqs.size(); ++i)
    traces.push_back({"t" + std::to_string(i), seqs[i], pdbench::Provenance::fitting});
  return pdbench::EventLog(std::move(traces));
}

inline bool accepts(const pdbench::PetriNet& net, const Sequence& s) {
  pdbench::ReplayEngine engine(net);
  return engine.replay(s) == pdbench::ReplayVerdict::fits;
}

/// Calls `f` on every string over `alphabet` of length 0..max_len.
inline void for_each_string(const std::vector<std::string>& alphabet, std::size_t max_len,
                            const std::function<void(const Sequence&)>& f) {
  Sequence cur;
  std::function<void()> rec = [&] {
    f(cur);
    if (cur.size() == max_len) return;
    for (const auto& a : alphabet) {
      cur.push_back(a);
      rec();
      cur.pop_back();
    }
  };
  rec();
}

/// Strings of length <= max_len over the alphabet accepted by the net.
inline std::set<Sequence> accepted_up_to(const pdbench::PetriNet& net,
                                         const std::vector<std::string>& alphabet,
                                         std::size_t max_len) {
  pdbench::ReplayEngine engine(net);
  std::set<Sequence> out;
  for_each_string(alphabet, max_len, [&](const Sequence& s) {
    if (engine.replay(s) == pdbench::ReplayVerdict::fits) out.insert(s);
  });
  return out;
}

}  // namespace pdtest
