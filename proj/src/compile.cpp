#include "pdbench/compile.hpp"

#include <map>

#include "pdbench/errors.hpp"

namespace pdbench {

namespace {

constexpr std::size_t kMaxInclusiveChildren = 12;

class TreeCompiler {
 public:
  explicit TreeCompiler(const ProcessTree& tree) : tree_(tree) {
    const auto& deps = tree.long_term_deps();
    for (std::size_t i = 0; i < deps.size(); ++i) {
      dep_places_.push_back({b_.add_place("dep" + std::to_string(i) + "_taken"),
                             b_.add_place("dep" + std::to_string(i) + "_skipped")});
      as_source_[deps[i].source.node].push_back(i);
      as_target_[deps[i].target.node] = i;
    }
  }

  PetriNet run() {
    PlaceId source = b_.add_place("source");
    PlaceId sink = b_.add_place("sink");
    b_.mark_initial(source);
    b_.mark_final(sink);
    compile(tree_.root(), source, sink);
    return b_.build();
  }

 private:
  struct DepPlaces {
    PlaceId taken;
    PlaceId skipped;
  };

  const ProcessTree& tree_;
  PetriNetBuilder b_;
  std::vector<DepPlaces> dep_places_;
  std::map<NodeId, std::vector<std::size_t>> as_source_;
  std::map<NodeId, std::size_t> as_target_;

  TransitionId silent(PlaceId in, PlaceId out) {
    TransitionId t = b_.add_transition(std::nullopt);
    b_.add_input(t, in);
    b_.add_output(t, out);
    return t;
  }

  void compile(NodeId id, PlaceId in, PlaceId out) {
    const TreeNode& n = tree_.node(id);
    switch (n.kind) {
      case NodeKind::activity: {
        TransitionId t = b_.add_transition(n.label);
        b_.add_input(t, in);
        b_.add_output(t, out);
        break;
      }
      case NodeKind::silent:
        silent(in, out);
        break;
      case NodeKind::sequence: {
        PlaceId cur = in;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          PlaceId next = (i + 1 == n.children.size()) ? out : b_.add_place();
          compile(n.children[i], cur, next);
          cur = next;
        }
        break;
      }
      case NodeKind::exclusive:
        if (as_source_.count(id) || as_target_.count(id))
          compile_constrained_choice(id, in, out);
        else
          for (NodeId c : n.children) compile(c, in, out);
        break;
      case NodeKind::parallel: {
        TransitionId fork = b_.add_transition(std::nullopt);
        TransitionId join = b_.add_transition(std::nullopt);
        b_.add_input(fork, in);
        b_.add_output(join, out);
        for (NodeId c : n.children) {
          PlaceId ci = b_.add_place();
          PlaceId co = b_.add_place();
          b_.add_output(fork, ci);
          b_.add_input(join, co);
          compile(c, ci, co);
        }
        break;
      }
      case NodeKind::inclusive: {
        std::size_t k = n.children.size();
        if (k > kMaxInclusiveChildren)
          throw MalformedTree("inclusive choice with more than " +
                              std::to_string(kMaxInclusiveChildren) + " children");
        std::vector<PlaceId> ci(k), co(k);
        TransitionId join = b_.add_transition(std::nullopt);
        b_.add_output(join, out);
        for (std::size_t i = 0; i < k; ++i) {
          ci[i] = b_.add_place();
          co[i] = b_.add_place();
          b_.add_input(join, co[i]);
        }
        // One split per nonempty subset; skipped children get their done token
        // directly.
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
          TransitionId split = b_.add_transition(std::nullopt);
          b_.add_input(split, in);
          for (std::size_t i = 0; i < k; ++i)
            b_.add_output(split, ((mask >> i) & 1U) ? ci[i] : co[i]);
        }
        for (std::size_t i = 0; i < k; ++i) compile(n.children[i], ci[i], co[i]);
        break;
      }
      case NodeKind::loop: {
        PlaceId start = b_.add_place();
        PlaceId done = b_.add_place();
        silent(in, start);
        compile(n.children[0], start, done);
        compile(n.children[1], done, start);
        silent(done, out);
        break;
      }
    }
  }

  // Each branch gets explicit silent entry transitions that produce the
  // taken/skipped tokens of dependencies sourced here and consume the token of
  // the dependency targeting this choice.
  void compile_constrained_choice(NodeId id, PlaceId in, PlaceId out) {
    const TreeNode& n = tree_.node(id);
    const auto& deps = tree_.long_term_deps();
    auto src = as_source_.find(id);
    auto tgt = as_target_.find(id);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      PlaceId branch = b_.add_place();
      std::vector<std::optional<PlaceId>> variants;
      if (tgt == as_target_.end()) {
        variants.push_back(std::nullopt);
      } else {
        const DepPlaces& dp = dep_places_[tgt->second];
        if (i == deps[tgt->second].target.branch) variants.push_back(dp.taken);
        variants.push_back(dp.skipped);
      }
      for (const auto& consume : variants) {
        TransitionId t = silent(in, branch);
        if (consume) b_.add_input(t, *consume);
        if (src != as_source_.end()) {
          for (std::size_t d : src->second) {
            const DepPlaces& dp = dep_places_[d];
            b_.add_output(t, i == deps[d].source.branch ? dp.taken : dp.skipped);
          }
        }
      }
      compile(n.children[i], branch, out);
    }
  }
};

}  // namespace

PetriNet compile_tree_to_net(const ProcessTree& tree) { return TreeCompiler(tree).run(); }

}  // namespace pdbench
