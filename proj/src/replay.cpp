#include "pdbench/replay.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_set>

#include "pdbench/errors.hpp"

namespace pdbench {

namespace {

struct KeyHash {
  std::size_t operator()(const std::basic_string<std::uint8_t>& k) const noexcept {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(k.data()), k.size()));
  }
};

}  // namespace

const char* to_string(ReplayVerdict v) {
  switch (v) {
    case ReplayVerdict::fits: return "fits";
    case ReplayVerdict::not_fits: return "not-fits";
    case ReplayVerdict::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

ReplayEngine::ReplayEngine(const PetriNet& net, ReplayOptions options)
    : options_(options) {
  net.validate();
  if (options_.state_budget < 1) throw std::invalid_argument("replay budget must be >= 1");
  options_.token_bound = std::clamp<std::uint32_t>(options_.token_bound, 1, 254);

  for (const auto& t : net.transitions()) {
    Arcs a{{t.inputs.begin(), t.inputs.end()}, {t.outputs.begin(), t.outputs.end()}};
    if (t.label)
      visible_[*t.label].push_back(std::move(a));
    else
      silent_.push_back(std::move(a));
  }
  auto to_key = [&](const Marking& m) {
    Key k(m.size(), 0);
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (m[p] > options_.token_bound) initial_over_bound_ = true;
      k[p] = static_cast<std::uint8_t>(std::min<std::uint32_t>(m[p], 255));
    }
    return k;
  };
  initial_ = to_key(net.initial_marking());
  final_ = to_key(net.final_marking());
}

bool ReplayEngine::fire(const Key& from, const Arcs& t, Key& to) const {
  for (auto p : t.inputs)
    if (from[p] == 0) return false;
  to = from;
  for (auto p : t.inputs) --to[p];
  for (auto p : t.outputs) {
    if (to[p] >= options_.token_bound) return false;
    ++to[p];
  }
  return true;
}

bool ReplayEngine::closure(std::vector<Key>& layer, std::size_t& visited) const {
  std::unordered_set<Key, KeyHash> seen(layer.begin(), layer.end());
  Key next;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    for (const auto& t : silent_) {
      if (!fire(layer[i], t, next)) continue;
      if (!seen.insert(next).second) continue;
      if (++visited > options_.state_budget) return false;
      layer.push_back(next);
    }
  }
  return true;
}

ReplayVerdict ReplayEngine::run(std::span<const std::string> events,
                                bool require_final) const {
  if (initial_over_bound_) return ReplayVerdict::not_fits;
  std::size_t visited = 1;
  std::vector<Key> layer{initial_};
  if (!closure(layer, visited)) return ReplayVerdict::budget_exceeded;

  Key next;
  for (const auto& event : events) {
    auto it = visible_.find(event);
    if (it == visible_.end()) return ReplayVerdict::not_fits;
    std::vector<Key> stepped;
    std::unordered_set<Key, KeyHash> seen;
    for (const auto& m : layer) {
      for (const auto& t : it->second) {
        if (!fire(m, t, next)) continue;
        if (!seen.insert(next).second) continue;
        if (++visited > options_.state_budget) return ReplayVerdict::budget_exceeded;
        stepped.push_back(next);
      }
    }
    if (stepped.empty()) return ReplayVerdict::not_fits;
    layer = std::move(stepped);
    if (!closure(layer, visited)) return ReplayVerdict::budget_exceeded;
  }
  if (!require_final) return ReplayVerdict::fits;
  bool reached = std::find(layer.begin(), layer.end(), final_) != layer.end();
  return reached ? ReplayVerdict::fits : ReplayVerdict::not_fits;
}

ReplayVerdict ReplayEngine::replay(std::span<const std::string> events) const {
  return run(events, true);
}

ReplayVerdict ReplayEngine::viable_prefix(std::span<const std::string> prefix) const {
  return run(prefix, false);
}

ReplayVerdict replay_fits(const PetriNet& net, const Trace& trace,
                          const ReplayOptions& options) {
  return ReplayEngine(net, options).replay(trace);
}

}  // namespace pdbench
