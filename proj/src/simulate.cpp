#include "pdbench/simulate.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

#include "pdbench/errors.hpp"
#include "pdbench/tree_language.hpp"

namespace pdbench {

namespace {

std::size_t draw_weighted(const std::vector<double>& w, Rng& rng) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return w.size() - 1;
}

// One random walk. Frames live in an arena; leaves whose predecessors have
// completed sit in `enabled_` until fired.
class Walker {
 public:
  Walker(const ProcessTree& tree, Rng& rng, const SimulationOptions& options)
      : tree_(tree), rng_(rng), options_(options) {
    for (const auto& d : tree.long_term_deps()) targeted_by_[d.target.node] = d;
  }

  std::vector<std::string> walk() {
    frames_.clear();
    enabled_.clear();
    last_branch_.clear();
    events_.clear();
    finished_ = false;
    start(tree_.root(), kNone);
    while (!finished_) {
      if (enabled_.empty()) throw std::logic_error("simulation stalled");
      std::size_t pick = uniform_index(rng_, enabled_.size());
      std::size_t f = enabled_[pick];
      enabled_[pick] = enabled_.back();
      enabled_.pop_back();
      const TreeNode& leaf = tree_.node(frames_[f].node);
      if (leaf.kind == NodeKind::activity) events_.push_back(leaf.label);
      complete(f);
    }
    return events_;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Frame {
    NodeId node;
    std::size_t parent;
    std::size_t position = 0;    // sequence: running child
    std::size_t pending = 0;     // parallel / inclusive: unfinished children
    std::size_t iterations = 0;  // loop: redo count
    bool in_redo = false;
  };

  const ProcessTree& tree_;
  Rng& rng_;
  const SimulationOptions& options_;
  std::map<NodeId, LongTermDep> targeted_by_;
  std::map<NodeId, std::size_t> last_branch_;
  std::vector<Frame> frames_;
  std::vector<std::size_t> enabled_;
  std::vector<std::string> events_;
  bool finished_ = false;

  std::size_t choose_exclusive(NodeId id) {
    const TreeNode& n = tree_.node(id);
    std::size_t branch;
    auto dep = targeted_by_.find(id);
    auto src = dep == targeted_by_.end() ? last_branch_.end()
                                         : last_branch_.find(dep->second.source.node);
    if (src != last_branch_.end() && src->second == dep->second.source.branch)
      branch = dep->second.target.branch;
    else
      branch = draw_weighted(n.weights, rng_);
    last_branch_[id] = branch;
    return branch;
  }

  std::vector<std::size_t> choose_subset(const TreeNode& n) {
    std::size_t k = n.children.size();
    double mean = std::accumulate(n.weights.begin(), n.weights.end(), 0.0) /
                  static_cast<double>(k);
    std::vector<double> mass;
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      double m = 1.0;
      for (std::size_t i = 0; i < k; ++i)
        if ((mask >> i) & 1U) m *= n.weights[i] / mean;
      mass.push_back(m);
    }
    std::size_t mask = draw_weighted(mass, rng_) + 1;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < k; ++i)
      if ((mask >> i) & 1U) chosen.push_back(i);
    return chosen;
  }

  void start(NodeId id, std::size_t parent) {
    std::size_t f = frames_.size();
    frames_.push_back(Frame{id, parent});
    const TreeNode& n = tree_.node(id);
    switch (n.kind) {
      case NodeKind::activity:
      case NodeKind::silent:
        enabled_.push_back(f);
        break;
      case NodeKind::sequence:
        start(n.children[0], f);
        break;
      case NodeKind::exclusive:
        start(n.children[choose_exclusive(id)], f);
        break;
      case NodeKind::parallel:
        frames_[f].pending = n.children.size();
        for (NodeId c : n.children) start(c, f);
        break;
      case NodeKind::inclusive: {
        auto chosen = choose_subset(n);
        frames_[f].pending = chosen.size();
        for (std::size_t i : chosen) start(n.children[i], f);
        break;
      }
      case NodeKind::loop:
        start(n.children[0], f);
        break;
    }
  }

  void complete(std::size_t f) {
    std::size_t p = frames_[f].parent;
    if (p == kNone) {
      finished_ = true;
      return;
    }
    Frame& pf = frames_[p];
    const TreeNode& pn = tree_.node(pf.node);
    switch (pn.kind) {
      case NodeKind::sequence:
        if (++pf.position < pn.children.size())
          start(pn.children[pf.position], p);
        else
          complete(p);
        break;
      case NodeKind::exclusive:
        complete(p);
        break;
      case NodeKind::parallel:
      case NodeKind::inclusive:
        if (--pf.pending == 0) complete(p);
        break;
      case NodeKind::loop:
        if (pf.in_redo) {
          pf.in_redo = false;
          ++pf.iterations;
          start(pn.children[0], p);
        } else if (pf.iterations < options_.max_loop_iterations &&
                   uniform01(rng_) >= pn.exit_prob) {
          pf.in_redo = true;
          start(pn.children[1], p);
        } else {
          complete(p);
        }
        break;
      default:
        throw std::logic_error("leaf cannot be a parent");
    }
  }
};

}  // namespace

EventLog simulate_log(const ProcessTree& tree, std::size_t n_traces, Rng& rng,
                      const SimulationOptions& options) {
  if (n_traces < 1) throw std::invalid_argument("simulate_log: n_traces must be >= 1");
  Walker walker(tree, rng, options);
  std::vector<Trace> traces;
  traces.reserve(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) {
    Trace t;
    t.case_id = options.case_prefix + std::to_string(i + 1);
    t.events = walker.walk();
    t.provenance = Provenance::fitting;
    traces.push_back(std::move(t));
  }
  return EventLog(std::move(traces));
}

Completeness completeness(const EventLog& log, const ProcessTree& tree,
                          std::size_t max_loop_unroll, std::size_t max_traces) {
  BoundedLanguage lang = tree_language_bounded(tree, max_loop_unroll, max_traces);
  if (lang.traces.empty()) throw EmptyLanguage("bounded language is empty");
  Completeness c;
  c.language_size = lang.traces.size();
  for (const auto& v : log.variants())
    if (lang.traces.count(v)) ++c.observed;
  c.ratio = static_cast<double>(c.observed) / static_cast<double>(c.language_size);
  c.lower_bound = lang.truncated;
  return c;
}

}  // namespace pdbench
