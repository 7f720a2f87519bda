#include "pdbench/process_tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "pdbench/errors.hpp"

namespace pdbench {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::activity: return "activity";
    case NodeKind::silent: return "silent";
    case NodeKind::sequence: return "sequence";
    case NodeKind::exclusive: return "exclusive";
    case NodeKind::parallel: return "parallel";
    case NodeKind::inclusive: return "inclusive";
    case NodeKind::loop: return "loop";
  }
  return "?";
}

bool is_operator(NodeKind kind) {
  return kind != NodeKind::activity && kind != NodeKind::silent;
}

namespace {

void check_node(const TreeNode& n, NodeId id) {
  auto fail = [&](const std::string& what) {
    throw MalformedTree("node " + std::to_string(id) + " (" + to_string(n.kind) +
                        "): " + what);
  };
  switch (n.kind) {
    case NodeKind::activity:
      if (n.label.empty()) fail("empty activity label");
      [[fallthrough]];
    case NodeKind::silent:
      if (!n.children.empty()) fail("leaf with children");
      if (!n.weights.empty()) fail("leaf with weights");
      break;
    case NodeKind::sequence:
    case NodeKind::parallel:
      if (n.children.size() < 2) fail("fewer than two children");
      if (!n.weights.empty()) fail("unexpected weights");
      break;
    case NodeKind::exclusive:
    case NodeKind::inclusive:
      if (n.children.size() < 2) fail("fewer than two children");
      if (n.weights.size() != n.children.size()) fail("weight count mismatch");
      for (double w : n.weights)
        if (!(w > 0.0) || !std::isfinite(w)) fail("non-positive weight");
      break;
    case NodeKind::loop:
      if (n.children.size() != 2) fail("loop needs exactly body and redo");
      if (!n.weights.empty()) fail("unexpected weights");
      if (!(n.exit_prob > 0.0 && n.exit_prob <= 1.0))
        fail("exit probability outside (0,1]");
      break;
  }
}

}  // namespace

ProcessTree::ProcessTree(std::vector<TreeNode> nodes, std::vector<LongTermDep> deps)
    : nodes_(std::move(nodes)), deps_(std::move(deps)) {
  if (nodes_.empty()) throw MalformedTree("empty tree");
  parents_.assign(nodes_.size(), nodes_.size());

  // Preorder layout: an iterative DFS must visit ids 0,1,2,... in order.
  std::vector<NodeId> stack{0};
  NodeId expected = 0;
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (id != expected)
      throw MalformedTree("nodes are not stored in preorder (saw " +
                          std::to_string(id) + ", expected " +
                          std::to_string(expected) + ")");
    ++expected;
    const TreeNode& n = nodes_[id];
    check_node(n, id);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      if (*it >= nodes_.size() || *it <= id)
        throw MalformedTree("child index out of range at node " + std::to_string(id));
      parents_[*it] = id;
      stack.push_back(*it);
    }
  }
  if (expected != nodes_.size()) throw MalformedTree("unreachable nodes in tree");

  bool has_activity = std::any_of(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
    return n.kind == NodeKind::activity;
  });
  if (!has_activity && !(nodes_.size() == 1 && nodes_[0].kind == NodeKind::silent))
    throw MalformedTree("tree without activities");

  std::set<NodeId> targets;
  for (const auto& d : deps_) {
    for (const BranchRef& r : {d.source, d.target}) {
      if (r.node >= nodes_.size() || nodes_[r.node].kind != NodeKind::exclusive)
        throw MalformedTree("ltdep endpoint " + std::to_string(r.node) +
                            " is not an exclusive choice");
      if (r.branch >= nodes_[r.node].children.size())
        throw MalformedTree("ltdep branch index out of range");
    }
    if (!ltdep_eligible(*this, d.source.node, d.target.node))
      throw MalformedTree("ltdep " + std::to_string(d.source.node) + " -> " +
                          std::to_string(d.target.node) +
                          " is not a sequence-ordered pair");
    if (!targets.insert(d.target.node).second)
      throw MalformedTree("exclusive choice " + std::to_string(d.target.node) +
                          " is the target of more than one ltdep");
  }
}

std::optional<NodeId> ProcessTree::parent(NodeId id) const {
  if (id >= parents_.size() || parents_[id] == nodes_.size()) return std::nullopt;
  return parents_[id];
}

std::vector<std::string> ProcessTree::visible_labels() const {
  std::set<std::string> labels;
  for (const auto& n : nodes_)
    if (n.kind == NodeKind::activity) labels.insert(n.label);
  return {labels.begin(), labels.end()};
}

std::size_t ProcessTree::visible_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [](const TreeNode& n) { return n.kind == NodeKind::activity; }));
}

namespace {

std::vector<NodeId> path_to_root(const ProcessTree& tree, NodeId id) {
  std::vector<NodeId> path{id};
  while (auto p = tree.parent(path.back())) path.push_back(*p);
  return path;
}

}  // namespace

NodeId lowest_common_ancestor(const ProcessTree& tree, NodeId a, NodeId b) {
  auto pa = path_to_root(tree, a);
  auto pb = path_to_root(tree, b);
  NodeId lca = tree.root();
  auto ia = pa.rbegin();
  auto ib = pb.rbegin();
  while (ia != pa.rend() && ib != pb.rend() && *ia == *ib) {
    lca = *ia;
    ++ia;
    ++ib;
  }
  return lca;
}

bool ltdep_eligible(const ProcessTree& tree, NodeId source, NodeId target) {
  if (source == target || source >= tree.size() || target >= tree.size()) return false;
  if (tree.node(source).kind != NodeKind::exclusive ||
      tree.node(target).kind != NodeKind::exclusive)
    return false;
  NodeId lca = lowest_common_ancestor(tree, source, target);
  if (lca == source || lca == target) return false;
  if (tree.node(lca).kind != NodeKind::sequence) return false;

  // Walks up to the child of `lca`, checking the nodes strictly in between.
  auto top_child = [&](NodeId id) -> std::optional<NodeId> {
    NodeId cur = id;
    while (true) {
      NodeId p = *tree.parent(cur);
      if (p == lca) return cur;
      NodeKind k = tree.node(p).kind;
      if (k != NodeKind::sequence && k != NodeKind::parallel) return std::nullopt;
      cur = p;
    }
  };
  auto cs = top_child(source);
  auto ct = top_child(target);
  if (!cs || !ct) return false;
  // Preorder ids of siblings increase left to right.
  return *cs < *ct;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& label) {
  std::string out = "'";
  for (char c : label) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

void print_node(const ProcessTree& tree, NodeId id, std::string& out) {
  const TreeNode& n = tree.node(id);
  switch (n.kind) {
    case NodeKind::activity: out += quote(n.label); return;
    case NodeKind::silent: out += "tau"; return;
    case NodeKind::sequence: out += "->"; break;
    case NodeKind::exclusive: out += "X"; break;
    case NodeKind::parallel: out += "+"; break;
    case NodeKind::inclusive: out += "O"; break;
    case NodeKind::loop: out += "*"; break;
  }
  if (n.kind == NodeKind::exclusive || n.kind == NodeKind::inclusive) {
    bool all_unit = std::all_of(n.weights.begin(), n.weights.end(),
                                [](double w) { return w == 1.0; });
    if (!all_unit) {
      out += '[';
      for (std::size_t i = 0; i < n.weights.size(); ++i) {
        if (i) out += ':';
        out += format_number(n.weights[i]);
      }
      out += ']';
    }
  } else if (n.kind == NodeKind::loop && n.exit_prob != 0.5) {
    out += '[' + format_number(n.exit_prob) + ']';
  }
  out += "( ";
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ", ";
    print_node(tree, n.children[i], out);
  }
  out += " )";
}

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  ProcessTree parse() {
    parse_node();
    std::vector<LongTermDep> deps;
    skip_ws();
    while (!at_end()) {
      expect_word("ltdep");
      LongTermDep d;
      d.source = parse_ref();
      skip_ws();
      expect("->");
      d.target = parse_ref();
      deps.push_back(d);
      skip_ws();
    }
    return ProcessTree(std::move(nodes_), std::move(deps));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<TreeNode> nodes_;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("tree text, offset " + std::to_string(pos_) + ": " + what);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(std::string_view s) {
    skip_ws();
    return text_.substr(pos_, s.size()) == s;
  }
  void expect(std::string_view s) {
    if (!peek(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }
  void expect_word(std::string_view s) {
    expect(s);
    if (!at_end() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
      fail("expected '" + std::string(s) + "'");
  }

  double parse_number() {
    skip_ws();
    double v = 0.0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  std::size_t parse_index() {
    skip_ws();
    std::size_t v = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) fail("expected index");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  BranchRef parse_ref() {
    BranchRef r;
    r.node = parse_index();
    if (at_end() || text_[pos_] != '.') fail("expected '.' in ltdep reference");
    ++pos_;
    r.branch = parse_index();
    return r;
  }

  std::string parse_label() {
    expect("'");
    std::string label;
    while (true) {
      if (at_end()) fail("unterminated label");
      char c = text_[pos_++];
      if (c == '\'') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape");
        c = text_[pos_++];
      }
      label += c;
    }
    return label;
  }

  NodeId parse_node() {
    skip_ws();
    NodeId id = nodes_.size();
    nodes_.emplace_back();
    if (peek("'")) {
      std::string label = parse_label();
      nodes_[id].kind = NodeKind::activity;
      nodes_[id].label = std::move(label);
      return id;
    }
    if (peek("tau")) {
      expect_word("tau");
      nodes_[id].kind = NodeKind::silent;
      return id;
    }
    NodeKind kind;
    if (peek("->")) {
      pos_ += 2;
      kind = NodeKind::sequence;
    } else if (peek("X")) {
      ++pos_;
      kind = NodeKind::exclusive;
    } else if (peek("+")) {
      ++pos_;
      kind = NodeKind::parallel;
    } else if (peek("O")) {
      ++pos_;
      kind = NodeKind::inclusive;
    } else if (peek("*")) {
      ++pos_;
      kind = NodeKind::loop;
    } else {
      fail("expected node");
    }
    nodes_[id].kind = kind;

    std::vector<double> annotation;
    if (peek("[")) {
      ++pos_;
      annotation.push_back(parse_number());
      while (peek(":")) {
        ++pos_;
        annotation.push_back(parse_number());
      }
      expect("]");
    }
    expect("(");
    std::vector<NodeId> children{parse_node()};
    while (peek(",")) {
      ++pos_;
      children.push_back(parse_node());
    }
    expect(")");

    TreeNode& n = nodes_[id];
    n.children = std::move(children);
    if (kind == NodeKind::exclusive || kind == NodeKind::inclusive) {
      if (annotation.empty()) annotation.assign(n.children.size(), 1.0);
      n.weights = std::move(annotation);
    } else if (kind == NodeKind::loop) {
      if (annotation.size() > 1) fail("loop takes a single exit probability");
      if (!annotation.empty()) n.exit_prob = annotation.front();
    } else if (!annotation.empty()) {
      fail("annotation not allowed on this operator");
    }
    return id;
  }
};

}  // namespace

std::string to_text(const ProcessTree& tree) {
  std::string out;
  print_node(tree, tree.root(), out);
  for (const auto& d : tree.long_term_deps()) {
    out += "\nltdep " + std::to_string(d.source.node) + '.' +
           std::to_string(d.source.branch) + " -> " + std::to_string(d.target.node) +
           '.' + std::to_string(d.target.branch);
  }
  return out;
}

ProcessTree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

}  // namespace pdbench
