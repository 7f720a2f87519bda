#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdbench {

using NodeId = std::size_t;

enum class NodeKind {
  activity,
  silent,
  sequence,
  exclusive,  // XOR
  parallel,   // AND
  inclusive,  // OR
  loop,
};

const char* to_string(NodeKind kind);
bool is_operator(NodeKind kind);

struct TreeNode {
  NodeKind kind = NodeKind::silent;
  std::string label;              // activity leaves only
  std::vector<NodeId> children;   // loop: {body, redo}
  std::vector<double> weights;    // exclusive / inclusive only
  double exit_prob = 0.5;         // loop only

  bool operator==(const TreeNode&) const = default;
};

struct BranchRef {
  NodeId node = 0;
  std::size_t branch = 0;
  bool operator==(const BranchRef&) const = default;
};

/// If the source branch is taken, the target choice is forced onto the
/// target branch.
struct LongTermDep {
  BranchRef source;
  BranchRef target;
  bool operator==(const LongTermDep&) const = default;
};

/// Block-structured process model. Nodes are stored in preorder with the
/// root at index 0; the constructor validates every structural invariant
/// and throws MalformedTree otherwise.
class ProcessTree {
 public:
  explicit ProcessTree(std::vector<TreeNode> nodes,
                       std::vector<LongTermDep> deps = {});

  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const std::vector<LongTermDep>& long_term_deps() const noexcept {
    return deps_;
  }
  std::optional<NodeId> parent(NodeId id) const;

  /// Distinct activity labels, sorted.
  std::vector<std::string> visible_labels() const;
  /// Number of activity leaves (duplicates counted individually).
  std::size_t visible_count() const;

  bool operator==(const ProcessTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<LongTermDep> deps_;
  std::vector<NodeId> parents_;
};

/// Structural eligibility of an exclusive-choice pair for a long-term
/// dependency: both nodes are exclusive choices whose lowest common ancestor
/// is a sequence with the source in an earlier child, and every node strictly
/// between that ancestor and either endpoint is a sequence or a parallel
/// operator (so both choices run exactly once per run of the ancestor).
bool ltdep_eligible(const ProcessTree& tree, NodeId source, NodeId target);

/// Lowest common ancestor of two nodes.
NodeId lowest_common_ancestor(const ProcessTree& tree, NodeId a, NodeId b);

/// Canonical text form, e.g. `->( 'a', X[3:1]( 'b', tau ) )`, followed by one
/// `ltdep S.i -> T.j` line per long-term dependency.
std::string to_text(const ProcessTree& tree);

/// Parses the canonical text form. Throws ParseError or MalformedTree.
ProcessTree parse_tree(std::string_view text);

}  // namespace pdbench
