#include "pdbench/dfg.hpp"

namespace pdbench {

DirectlyFollowsGraph build_dfg(const std::vector<std::vector<std::string>>& traces) {
  DirectlyFollowsGraph g;
  for (const auto& t : traces) {
    if (t.empty()) {
      ++g.empty_traces;
      continue;
    }
    g.nodes.insert(t.begin(), t.end());
    ++g.start[t.front()];
    ++g.end[t.back()];
    for (std::size_t i = 0; i + 1 < t.size(); ++i) ++g.edges[{t[i], t[i + 1]}];
  }
  return g;
}

DirectlyFollowsGraph build_dfg(const EventLog& log) {
  std::vector<std::vector<std::string>> traces;
  traces.reserve(log.size());
  for (const auto& t : log.traces()) traces.push_back(t.events);
  return build_dfg(traces);
}

}  // namespace pdbench
