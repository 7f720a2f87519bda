#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include <boost/dynamic_bitset.hpp>

#include "pdbench/errors.hpp"
#include "pdbench/miners.hpp"

namespace pdbench {

namespace {

using Bits = boost::dynamic_bitset<>;

constexpr std::size_t kMaxPlaces = 20000;
constexpr std::size_t kMaxExpansions = 5000000;

struct Footprint {
  std::vector<std::string> acts;
  std::vector<std::vector<char>> succ, causal, choice;
  std::vector<char> start, end;
};

Footprint footprint(const std::vector<std::vector<std::string>>& traces) {
  Footprint f;
  std::set<std::string> a;
  for (const auto& t : traces) a.insert(t.begin(), t.end());
  f.acts.assign(a.begin(), a.end());
  std::size_t n = f.acts.size();
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(f.acts.begin(), f.acts.end(), s) -
                                    f.acts.begin());
  };
  std::vector<std::vector<char>> tri(n, std::vector<char>(n, 0));
  f.succ.assign(n, std::vector<char>(n, 0));
  f.start.assign(n, 0);
  f.end.assign(n, 0);
  for (const auto& t : traces) {
    if (t.empty()) continue;
    f.start[idx(t.front())] = 1;
    f.end[idx(t.back())] = 1;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) f.succ[idx(t[i])][idx(t[i + 1])] = 1;
    for (std::size_t i = 0; i + 2 < t.size(); ++i)
      if (t[i] == t[i + 2]) tri[idx(t[i])][idx(t[i + 1])] = 1;
  }
  f.causal.assign(n, std::vector<char>(n, 0));
  f.choice.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool diamond = tri[i][j] && tri[j][i];
      f.causal[i][j] = f.succ[i][j] && (!f.succ[j][i] || diamond);
      f.choice[i][j] = !f.succ[i][j] && !f.succ[j][i];
    }
  return f;
}

// Maximal (A, B) pairs are the maximal cliques, with both sides nonempty, of
// the graph on {A-side, B-side} x activities where same-side vertices are
// adjacent under the choice relation and cross-side vertices under causality.
class PairFinder {
 public:
  explicit PairFinder(const Footprint& f) : n_(f.acts.size()), adj_(2 * n_, Bits(2 * n_)) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j && f.choice[i][j]) {
          adj_[i][j] = true;
          adj_[n_ + i][n_ + j] = true;
        }
        if (f.causal[i][j]) {
          adj_[i][n_ + j] = true;
          adj_[n_ + j][i] = true;
        }
      }
  }

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> run() {
    Bits p(2 * n_);
    for (std::size_t v = 0; v < 2 * n_; ++v) {
      // A vertex without a causal neighbour cannot be in a two-sided pair.
      Bits cross = adj_[v];
      if (v < n_) cross &= upper_mask(); else cross &= lower_mask();
      if (cross.any()) p.set(v);
    }
    expand(Bits(2 * n_), p, Bits(2 * n_));
    return std::move(out_);
  }

 private:
  Bits lower_mask() const {
    Bits m(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) m.set(i);
    return m;
  }
  Bits upper_mask() const { return ~lower_mask(); }

  void expand(Bits r, Bits p, Bits x) {
    if (++expansions_ > kMaxExpansions)
      throw MinerFailure("alpha_plus: place candidate search exceeded its budget");
    if (p.none() && x.none()) {
      record(r);
      return;
    }
    Bits px = p | x;
    std::size_t pivot = px.find_first();
    std::size_t best = 0;
    for (std::size_t u = px.find_first(); u != Bits::npos; u = px.find_next(u)) {
      std::size_t c = (p & adj_[u]).count();
      if (c >= best) {
        best = c;
        pivot = u;
      }
    }
    Bits cand = p - adj_[pivot];
    for (std::size_t v = cand.find_first(); v != Bits::npos; v = cand.find_next(v)) {
      Bits r2 = r;
      r2.set(v);
      expand(r2, p & adj_[v], x & adj_[v]);
      p.reset(v);
      x.set(v);
    }
  }

  void record(const Bits& r) {
    std::vector<std::size_t> a, b;
    for (std::size_t v = r.find_first(); v != Bits::npos; v = r.find_next(v))
      (v < n_ ? a : b).push_back(v < n_ ? v : v - n_);
    if (a.empty() || b.empty()) return;
    if (out_.size() >= kMaxPlaces)
      throw MinerFailure("alpha_plus: more than " + std::to_string(kMaxPlaces) +
                         " maximal place candidates");
    out_.emplace_back(std::move(a), std::move(b));
  }

  std::size_t n_;
  std::vector<Bits> adj_;
  std::size_t expansions_ = 0;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out_;
};

// Artificial first and last activity of every trace; both become silent
// transitions, so end (and start) places are found like any other place.
const std::string kStart = "\x01start";
const std::string kEnd = "\x01end";

std::string display(const std::string& a) {
  if (a == kStart) return "start";
  if (a == kEnd) return "end";
  return a;
}

std::string set_name(const std::vector<std::string>& acts, const std::vector<std::size_t>& ids) {
  std::string s = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) s += (k ? "," : "") + display(acts[ids[k]]);
  return s + "}";
}

std::vector<std::string> framed(const std::vector<std::string>& events) {
  std::vector<std::string> out{kStart};
  out.insert(out.end(), events.begin(), events.end());
  out.push_back(kEnd);
  return out;
}

}  // namespace

PetriNet miner_alpha_plus(const EventLog& training) {
  std::set<std::string> l1l;
  for (const auto& t : training.traces())
    for (std::size_t i = 0; i + 1 < t.events.size(); ++i)
      if (t.events[i] == t.events[i + 1]) l1l.insert(t.events[i]);

  std::vector<std::vector<std::string>> reduced;
  bool visible_left = false;
  for (const auto& t : training.traces()) {
    std::vector<std::string> r;
    for (const auto& e : t.events)
      if (!l1l.count(e)) r.push_back(e);
    visible_left = visible_left || !r.empty();
    reduced.push_back(framed(r));
  }
  if (!visible_left)
    throw MinerFailure("alpha_plus: no activity left after removing length-one loops");
  Footprint f = footprint(reduced);

  auto pairs = PairFinder(f).run();
  std::sort(pairs.begin(), pairs.end());

  PetriNetBuilder b;
  PlaceId source = b.add_place("i");
  PlaceId sink = b.add_place("o");
  std::map<std::string, TransitionId> trans;
  for (const auto& a : f.acts) {
    bool artificial = a == kStart || a == kEnd;
    trans[a] = b.add_transition(artificial ? std::nullopt : std::optional<std::string>(a), display(a));
  }
  for (const auto& a : l1l) trans[a] = b.add_transition(a);
  std::map<TransitionId, bool> has_in, has_out;
  auto arc_in = [&](TransitionId t, PlaceId p) { b.add_input(t, p); has_in[t] = true; };
  auto arc_out = [&](TransitionId t, PlaceId p) { b.add_output(t, p); has_out[t] = true; };
  arc_in(trans[kStart], source);
  arc_out(trans[kEnd], sink);

  struct PlaceSets {
    PlaceId id;
    std::set<std::string> in, out;
  };
  std::vector<PlaceSets> places;
  for (const auto& [a, bset] : pairs) {
    PlaceId p = b.add_place("p(" + set_name(f.acts, a) + "," + set_name(f.acts, bset) + ")");
    PlaceSets ps{p, {}, {}};
    for (std::size_t i : a) {
      arc_out(trans[f.acts[i]], p);
      ps.in.insert(f.acts[i]);
    }
    for (std::size_t j : bset) {
      arc_in(trans[f.acts[j]], p);
      ps.out.insert(f.acts[j]);
    }
    places.push_back(std::move(ps));
  }

  // Length-one loops: a self-loop on every place whose inputs all directly
  // precede the activity and whose outputs all directly follow it.
  for (const auto& t : l1l) {
    std::set<std::string> pre, post;
    for (const auto& tr : training.traces()) {
      auto ev = framed(tr.events);
      for (std::size_t i = 1; i + 1 < ev.size(); ++i) {
        if (ev[i] != t) continue;
        if (ev[i - 1] != t) pre.insert(ev[i - 1]);
        if (ev[i + 1] != t) post.insert(ev[i + 1]);
      }
    }
    auto subset = [](const std::set<std::string>& x, const std::set<std::string>& y) {
      return std::includes(y.begin(), y.end(), x.begin(), x.end());
    };
    for (const auto& ps : places) {
      if (subset(ps.in, pre) && subset(ps.out, post)) {
        arc_in(trans[t], ps.id);
        arc_out(trans[t], ps.id);
      }
    }
  }

  // A transition with an empty preset (or postset) is modelled by a self-loop
  // on a place that always holds one token.
  std::optional<PlaceId> free_place;
  for (const auto& [name, t] : trans) {
    if (has_in[t] && has_out[t]) continue;
    if (!free_place) {
      free_place = b.add_place("free");
      b.mark_initial(*free_place);
      b.mark_final(*free_place);
    }
    b.add_input(t, *free_place);
    b.add_output(t, *free_place);
  }

  b.mark_initial(source);
  b.mark_final(sink);
  return b.build();
}

}  // namespace pdbench
