#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "pdbench/compile.hpp"
#include "pdbench/miners.hpp"

namespace pdbench {

namespace {

// Activities are interned in lexicographic label order, so sorting by id is
// sorting by label. Only distinct traces matter to the cut detection.
using Word = std::vector<int>;
using Sublog = std::set<Word>;
using Parts = std::vector<std::vector<int>>;  // activity ids per part

struct INode {
  NodeKind kind = NodeKind::silent;
  int activity = -1;
  std::vector<INode> children;
};

INode leaf(int a) { return INode{NodeKind::activity, a, {}}; }
INode tau() { return INode{NodeKind::silent, -1, {}}; }
INode op(NodeKind k, std::vector<INode> children) {
  if (k != NodeKind::loop && children.size() == 1) return std::move(children.front());
  return INode{k, -1, std::move(children)};
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }
  // Groups of local indices, ordered by smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < parent_.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, g] : by_root) out.push_back(std::move(g));
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Local directly-follows view of a sublog over its sorted alphabet.
struct LocalDfg {
  std::vector<int> acts;
  std::vector<std::vector<char>> edge;
  std::vector<char> start, end;

  explicit LocalDfg(const Sublog& log) {
    std::set<int> a;
    for (const auto& w : log) a.insert(w.begin(), w.end());
    acts.assign(a.begin(), a.end());
    std::size_t n = acts.size();
    edge.assign(n, std::vector<char>(n, 0));
    start.assign(n, 0);
    end.assign(n, 0);
    for (const auto& w : log) {
      if (w.empty()) continue;
      start[local(w.front())] = 1;
      end[local(w.back())] = 1;
      for (std::size_t i = 0; i + 1 < w.size(); ++i) edge[local(w[i])][local(w[i + 1])] = 1;
    }
  }
  std::size_t size() const { return acts.size(); }
  std::size_t local(int a) const {
    return static_cast<std::size_t>(std::lower_bound(acts.begin(), acts.end(), a) - acts.begin());
  }
  Parts to_parts(const std::vector<std::vector<std::size_t>>& groups) const {
    Parts out;
    for (const auto& g : groups) {
      std::vector<int> p;
      for (std::size_t i : g) p.push_back(acts[i]);
      out.push_back(std::move(p));
    }
    return out;
  }
};

std::optional<Parts> xor_cut(const LocalDfg& g) {
  UnionFind uf(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.edge[i][j]) uf.unite(i, j);
  auto groups = uf.groups();
  if (groups.size() < 2) return std::nullopt;
  return g.to_parts(groups);
}

std::optional<Parts> sequence_cut(const LocalDfg& g) {
  std::size_t n = g.size();
  auto reach = g.edge;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (reach[i][j] == reach[j][i]) uf.unite(i, j);
  auto groups = uf.groups();
  if (groups.size() < 2) return std::nullopt;

  // Every cross-group pair must point the same way; order groups by how many
  // others they precede.
  std::size_t m = groups.size();
  std::vector<std::size_t> precedes(m, 0);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x + 1; y < m; ++y) {
      bool forward = reach[groups[x][0]][groups[y][0]] != 0;
      for (std::size_t i : groups[x])
        for (std::size_t j : groups[y]) {
          bool f = reach[i][j] && !reach[j][i];
          bool b = reach[j][i] && !reach[i][j];
          if (!(forward ? f : b)) return std::nullopt;
        }
      ++precedes[forward ? x : y];
    }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return precedes[a] > precedes[b]; });
  std::vector<std::vector<std::size_t>> sorted;
  for (std::size_t i : order) sorted.push_back(groups[i]);
  return g.to_parts(sorted);
}

std::optional<Parts> parallel_cut(const LocalDfg& g) {
  std::size_t n = g.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(g.edge[i][j] && g.edge[j][i])) uf.unite(i, j);
  auto groups = uf.groups();
  std::vector<std::vector<std::size_t>> complete, deficient;
  for (auto& grp : groups) {
    bool s = std::any_of(grp.begin(), grp.end(), [&](std::size_t i) { return g.start[i] != 0; });
    bool e = std::any_of(grp.begin(), grp.end(), [&](std::size_t i) { return g.end[i] != 0; });
    (s && e ? complete : deficient).push_back(std::move(grp));
  }
  if (complete.size() < 2) return std::nullopt;
  for (const auto& d : deficient) complete.front().insert(complete.front().end(), d.begin(), d.end());
  std::sort(complete.front().begin(), complete.front().end());
  return g.to_parts(complete);
}

// Part 0 is the body; the rest are redo parts.
std::optional<Parts> loop_cut(const LocalDfg& g) {
  std::size_t n = g.size();
  std::vector<char> body(n, 0);
  for (std::size_t i = 0; i < n; ++i) body[i] = g.start[i] || g.end[i];

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!body[i] && !body[j] && (g.edge[i][j] || g.edge[j][i])) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> comps;
  for (auto& grp : uf.groups())
    if (!body[grp.front()]) comps.push_back(std::move(grp));

  std::vector<char> merged(comps.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (merged[c]) continue;
      bool bad = false;
      for (std::size_t y : comps[c]) {
        std::size_t ends = 0, ends_in = 0, starts = 0, starts_out = 0;
        for (std::size_t x = 0; x < n; ++x) {
          if (!body[x]) continue;
          if (g.edge[x][y] && !g.end[x]) bad = true;
          if (g.edge[y][x] && !g.start[x]) bad = true;
          if (g.end[x]) {
            ++ends;
            ends_in += g.edge[x][y] ? 1 : 0;
          }
          if (g.start[x]) {
            ++starts;
            starts_out += g.edge[y][x] ? 1 : 0;
          }
        }
        // Entered from one end activity means entered from all of them;
        // likewise for returning to the start activities.
        if (ends_in != 0 && ends_in != ends) bad = true;
        if (starts_out != 0 && starts_out != starts) bad = true;
      }
      if (bad) {
        merged[c] = 1;
        for (std::size_t y : comps[c]) body[y] = 1;
        changed = true;
      }
    }
  }

  std::vector<std::vector<std::size_t>> parts(1);
  for (std::size_t i = 0; i < n; ++i)
    if (body[i]) parts[0].push_back(i);
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (!merged[c]) parts.push_back(comps[c]);
  if (parts.size() < 2) return std::nullopt;
  return g.to_parts(parts);
}

std::map<int, std::size_t> part_index(const Parts& parts) {
  std::map<int, std::size_t> idx;
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (int a : parts[p]) idx[a] = p;
  return idx;
}

std::vector<Sublog> split_xor(const Sublog& log, const Parts& parts) {
  auto idx = part_index(parts);
  std::vector<Sublog> out(parts.size());
  for (const auto& w : log) out[idx.at(w.front())].insert(w);
  return out;
}

std::vector<Sublog> split_projection(const Sublog& log, const Parts& parts) {
  auto idx = part_index(parts);
  std::vector<Sublog> out(parts.size());
  for (const auto& w : log) {
    std::vector<Word> proj(parts.size());
    for (int a : w) proj[idx.at(a)].push_back(a);
    for (std::size_t p = 0; p < parts.size(); ++p) out[p].insert(std::move(proj[p]));
  }
  return out;
}

std::vector<Sublog> split_loop(const Sublog& log, const Parts& parts) {
  auto idx = part_index(parts);
  std::vector<Sublog> out(parts.size());
  for (const auto& w : log) {
    std::size_t i = 0;
    while (i < w.size()) {
      std::size_t p = idx.at(w[i]);
      Word seg;
      while (i < w.size() && idx.at(w[i]) == p) seg.push_back(w[i++]);
      out[p].insert(std::move(seg));
    }
  }
  return out;
}

INode mine(const Sublog& log) {
  if (log.size() == 1 && log.begin()->empty()) return tau();
  if (log.begin()->empty()) {
    Sublog rest(std::next(log.begin()), log.end());
    return op(NodeKind::exclusive, {tau(), mine(rest)});
  }

  LocalDfg g(log);
  if (g.size() == 1 && log.size() == 1 && log.begin()->size() == 1) return leaf(g.acts[0]);

  auto recurse = [](const std::vector<Sublog>& subs) {
    std::vector<INode> kids;
    for (const auto& s : subs) kids.push_back(mine(s));
    return kids;
  };
  if (auto parts = xor_cut(g)) return op(NodeKind::exclusive, recurse(split_xor(log, *parts)));
  if (auto parts = sequence_cut(g))
    return op(NodeKind::sequence, recurse(split_projection(log, *parts)));
  if (auto parts = parallel_cut(g))
    return op(NodeKind::parallel, recurse(split_projection(log, *parts)));
  if (auto parts = loop_cut(g)) {
    auto kids = recurse(split_loop(log, *parts));
    INode body = std::move(kids.front());
    std::vector<INode> redo(std::make_move_iterator(kids.begin() + 1),
                            std::make_move_iterator(kids.end()));
    return INode{NodeKind::loop, -1, {std::move(body), op(NodeKind::exclusive, std::move(redo))}};
  }

  // Flower over the sublog alphabet. Empty traces were split off above, so
  // the body demands at least one activity.
  std::vector<INode> acts;
  for (int a : g.acts) acts.push_back(leaf(a));
  return INode{NodeKind::loop, -1, {op(NodeKind::exclusive, std::move(acts)), tau()}};
}

void flatten(const INode& n, const std::vector<std::string>& labels,
             std::vector<TreeNode>& out) {
  std::size_t id = out.size();
  out.emplace_back();
  out[id].kind = n.kind;
  if (n.kind == NodeKind::activity) out[id].label = labels[static_cast<std::size_t>(n.activity)];
  if (n.kind == NodeKind::exclusive) out[id].weights.assign(n.children.size(), 1.0);
  for (const auto& c : n.children) {
    out[id].children.push_back(out.size());
    flatten(c, labels, out);
  }
}

}  // namespace

ProcessTree inductive_tree(const EventLog& training) {
  std::vector<std::string> labels(training.alphabet().begin(), training.alphabet().end());
  Sublog log;
  for (const auto& t : training.traces()) {
    Word w;
    for (const auto& e : t.events)
      w.push_back(static_cast<int>(std::lower_bound(labels.begin(), labels.end(), e) -
                                   labels.begin()));
    log.insert(std::move(w));
  }
  if (log.empty()) log.insert(Word{});
  std::vector<TreeNode> nodes;
  flatten(mine(log), labels, nodes);
  return ProcessTree(std::move(nodes));
}

PetriNet miner_inductive_basic(const EventLog& training) {
  return compile_tree_to_net(inductive_tree(training));
}

}  // namespace pdbench
