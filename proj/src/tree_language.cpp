#include "pdbench/tree_language.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace pdbench {

namespace {

using Lang = std::set<Sequence>;
// Allowed branches per exclusive choice; absent means unrestricted.
using Restrictions = std::map<NodeId, std::vector<bool>>;

class LanguageEnumerator {
 public:
  LanguageEnumerator(const ProcessTree& tree, std::size_t unroll, std::size_t cap)
      : tree_(tree), unroll_(unroll), cap_(cap), deps_at_(tree.size()) {
    const auto& deps = tree.long_term_deps();
    for (std::size_t i = 0; i < deps.size(); ++i)
      deps_at_[lowest_common_ancestor(tree, deps[i].source.node, deps[i].target.node)]
          .push_back(i);
  }

  BoundedLanguage run() {
    BoundedLanguage out;
    out.traces = lang(tree_.root(), {});
    out.truncated = truncated_;
    return out;
  }

 private:
  const ProcessTree& tree_;
  std::size_t unroll_;
  std::size_t cap_;
  bool truncated_ = false;
  std::vector<std::vector<std::size_t>> deps_at_;

  void clip(Lang& l) {
    if (l.size() <= cap_) return;
    truncated_ = true;
    auto it = l.begin();
    std::advance(it, cap_);
    l.erase(it, l.end());
  }

  bool full(const Lang& l) const { return l.size() > cap_; }

  Lang concat(const Lang& a, const Lang& b) {
    Lang out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Sequence s = x;
        s.insert(s.end(), y.begin(), y.end());
        out.insert(std::move(s));
        if (out.size() > cap_) {
          clip(out);
          return out;
        }
      }
    }
    return out;
  }

  void interleave(const Sequence& x, std::size_t i, const Sequence& y, std::size_t j,
                  Sequence& cur, Lang& out) {
    if (out.size() > cap_) return;
    if (i == x.size() && j == y.size()) {
      out.insert(cur);
      return;
    }
    if (i < x.size()) {
      cur.push_back(x[i]);
      interleave(x, i + 1, y, j, cur, out);
      cur.pop_back();
    }
    if (j < y.size()) {
      cur.push_back(y[j]);
      interleave(x, i, y, j + 1, cur, out);
      cur.pop_back();
    }
  }

  Lang shuffle(const Lang& a, const Lang& b) {
    Lang out;
    Sequence cur;
    for (const auto& x : a) {
      for (const auto& y : b) {
        interleave(x, 0, y, 0, cur, out);
        if (out.size() > cap_) {
          clip(out);
          return out;
        }
      }
    }
    return out;
  }

  Lang lang(NodeId id, const Restrictions& r) {
    const auto& here = deps_at_[id];
    if (here.empty()) return lang_plain(id, r);

    // Case split per dependency: either the source takes its branch (and the
    // target is forced), or the source takes any other branch.
    const auto& deps = tree_.long_term_deps();
    Lang out;
    std::size_t combos = std::size_t{1} << here.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Restrictions rr = r;
      bool feasible = true;
      for (std::size_t k = 0; k < here.size() && feasible; ++k) {
        const LongTermDep& d = deps[here[k]];
        auto allowed = [&](NodeId x) -> std::vector<bool>& {
          auto it = rr.find(x);
          if (it == rr.end())
            it = rr.emplace(x, std::vector<bool>(tree_.node(x).children.size(), true))
                     .first;
          return it->second;
        };
        auto& src = allowed(d.source.node);
        bool taken = (mask >> k) & 1U;
        for (std::size_t b = 0; b < src.size(); ++b)
          if ((b == d.source.branch) != taken) src[b] = false;
        if (taken) {
          auto& tgt = allowed(d.target.node);
          for (std::size_t b = 0; b < tgt.size(); ++b)
            if (b != d.target.branch) tgt[b] = false;
        }
        for (const auto& [node, bits] : rr) {
          if (std::find(bits.begin(), bits.end(), true) == bits.end()) feasible = false;
        }
      }
      if (!feasible) continue;
      Lang part = lang_plain(id, rr);
      out.insert(part.begin(), part.end());
      if (out.size() > cap_) {
        clip(out);
        break;
      }
    }
    return out;
  }

  Lang lang_plain(NodeId id, const Restrictions& r) {
    const TreeNode& n = tree_.node(id);
    switch (n.kind) {
      case NodeKind::activity: return Lang{Sequence{n.label}};
      case NodeKind::silent: return Lang{Sequence{}};
      case NodeKind::sequence: {
        Lang acc = lang(n.children[0], r);
        for (std::size_t i = 1; i < n.children.size(); ++i)
          acc = concat(acc, lang(n.children[i], r));
        return acc;
      }
      case NodeKind::exclusive: {
        auto it = r.find(id);
        Lang acc;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (it != r.end() && !it->second[i]) continue;
          Lang part = lang(n.children[i], r);
          acc.insert(part.begin(), part.end());
          if (full(acc)) break;
        }
        clip(acc);
        return acc;
      }
      case NodeKind::parallel: {
        Lang acc = lang(n.children[0], r);
        for (std::size_t i = 1; i < n.children.size(); ++i)
          acc = shuffle(acc, lang(n.children[i], r));
        return acc;
      }
      case NodeKind::inclusive: {
        std::vector<Lang> parts;
        for (NodeId c : n.children) parts.push_back(lang(c, r));
        Lang acc;
        std::size_t k = parts.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
          Lang sub{Sequence{}};
          for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1U) sub = shuffle(sub, parts[i]);
          acc.insert(sub.begin(), sub.end());
          if (full(acc)) break;
        }
        clip(acc);
        return acc;
      }
      case NodeKind::loop: {
        Lang body = lang(n.children[0], r);
        Lang redo = lang(n.children[1], r);
        auto nonempty = [](const Lang& l) {
          for (const auto& s : l)
            if (!s.empty()) return true;
          return false;
        };
        if (nonempty(body) || nonempty(redo)) truncated_ = true;
        Lang acc = body;
        Lang cur = body;
        for (std::size_t m = 0; m < unroll_; ++m) {
          cur = concat(concat(cur, redo), body);
          acc.insert(cur.begin(), cur.end());
          if (full(acc)) break;
        }
        clip(acc);
        return acc;
      }
    }
    return {};
  }
};

}  // namespace

BoundedLanguage tree_language_bounded(const ProcessTree& tree,
                                      std::size_t max_loop_unroll,
                                      std::size_t max_traces) {
  if (max_traces < 1) throw std::invalid_argument("max_traces must be at least 1");
  return LanguageEnumerator(tree, max_loop_unroll, max_traces).run();
}

}  // namespace pdbench
