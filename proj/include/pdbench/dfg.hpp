#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pdbench/event_log.hpp"

namespace pdbench {

/// Directly-follows graph of a log (or of a list of event sequences).
struct DirectlyFollowsGraph {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::size_t> edges;
  std::map<std::string, std::size_t> start;
  std::map<std::string, std::size_t> end;
  std::size_t empty_traces = 0;

  bool has_edge(const std::string& a, const std::string& b) const {
    return edges.count({a, b}) > 0;
  }
  bool is_start(const std::string& a) const { return start.count(a) > 0; }
  bool is_end(const std::string& a) const { return end.count(a) > 0; }
};

DirectlyFollowsGraph build_dfg(const std::vector<std::vector<std::string>>& traces);
DirectlyFollowsGraph build_dfg(const EventLog& log);

}  // namespace pdbench
