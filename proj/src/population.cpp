#include "pdbench/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pdbench/errors.hpp"

namespace pdbench {

void PopulationSpec::validate() const {
  if (!(size_min >= 1 && size_min <= size_mode && size_mode <= size_max))
    throw InfeasibleSpec("size parameters must satisfy 1 <= min <= mode <= max");
  for (double p : {p_seq, p_xor, p_and, p_or, p_loop, p_silent, p_duplicate, p_ltdep}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InfeasibleSpec("probability outside [0,1]");
  }
  if (!(loop_exit_prob > 0.0 && loop_exit_prob <= 1.0))
    throw InfeasibleSpec("loop exit probability outside (0,1]");
  if (p_seq + p_xor + p_and + p_or + p_loop <= 0.0)
    throw InfeasibleSpec("all construct probabilities are zero");
}

ConstructProbs normalize_construct_probs(const ConstructProbs& raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("construct probabilities must be nonnegative");
    sum += v;
  }
  if (sum == 0.0) throw AllZero("all construct probabilities are zero");
  ConstructProbs out{};
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / sum;
  return out;
}

std::size_t sample_size(const PopulationSpec& spec, Rng& rng) {
  const double lo = static_cast<double>(spec.size_min);
  const double mode = static_cast<double>(spec.size_mode);
  const double hi = static_cast<double>(spec.size_max);
  const double u = uniform01(rng);
  if (spec.size_min == spec.size_max) return spec.size_min;
  // Inverse CDF of the triangular distribution.
  const double split = (mode - lo) / (hi - lo);
  double x = u < split ? lo + std::sqrt(u * (hi - lo) * (mode - lo))
                       : hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
  auto n = static_cast<std::size_t>(std::llround(x));
  return std::clamp(n, spec.size_min, spec.size_max);
}

std::string activity_name(std::size_t index) {
  std::string out;
  std::size_t n = index + 1;
  while (n > 0) {
    --n;
    out.insert(out.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  }
  return out;
}

namespace {

class TreeGenerator {
 public:
  TreeGenerator(const PopulationSpec& spec, Rng& rng)
      : spec_(spec), rng_(rng), probs_(normalize_construct_probs(spec.raw_construct_probs())) {}

  ProcessTree run() {
    std::size_t n = sample_size(spec_, rng_);
    // The first leaf cannot reuse a label, so later leaves duplicate at a
    // raised rate that keeps the expected duplicate share at p_duplicate.
    p_reuse_ = n > 1 ? std::min(1.0, spec_.p_duplicate * static_cast<double>(n) /
                                         static_cast<double>(n - 1))
                     : 0.0;
    expand(n);
    ProcessTree plain(nodes_);
    if (spec_.p_ltdep <= 0.0) return plain;
    auto deps = draw_dependencies(plain);
    if (deps.empty()) return plain;
    return ProcessTree(nodes_, std::move(deps));
  }

 private:
  const PopulationSpec& spec_;
  Rng& rng_;
  ConstructProbs probs_;
  std::vector<TreeNode> nodes_;
  std::vector<std::string> labels_;
  double p_reuse_ = 0.0;

  Construct draw_construct() {
    double u = uniform01(rng_);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] <= 0.0) continue;
      last = i;
      acc += probs_[i];
      if (u < acc) return static_cast<Construct>(i);
    }
    return static_cast<Construct>(last);
  }

  // Uniform random composition of n into k positive parts.
  std::vector<std::size_t> compose(std::size_t n, std::size_t k) {
    std::vector<std::size_t> cuts(n - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(uniform_index(rng_, cuts.size() - i));
      std::swap(cuts[i], cuts[j]);
    }
    cuts.resize(k - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> parts;
    std::size_t prev = 0;
    for (std::size_t c : cuts) {
      parts.push_back(c - prev);
      prev = c;
    }
    parts.push_back(n - prev);
    return parts;
  }

  std::string next_label() {
    if (!labels_.empty() && uniform01(rng_) < p_reuse_)
      return labels_[uniform_index(rng_, labels_.size())];
    labels_.push_back(activity_name(labels_.size()));
    return labels_.back();
  }

  std::vector<double> skewed_weights(std::size_t k) {
    std::vector<double> w(k);
    std::size_t dominant = uniform_index(rng_, k);
    double share = 0.75 + 0.2 * uniform01(rng_);
    double rest = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == dominant) continue;
      w[i] = std::max(-std::log1p(-uniform01(rng_)), 1e-9);
      rest += w[i];
    }
    for (std::size_t i = 0; i < k; ++i)
      w[i] = (i == dominant) ? share : (1.0 - share) * w[i] / rest;
    return w;
  }

  NodeId expand(std::size_t n) {
    NodeId id = nodes_.size();
    nodes_.emplace_back();
    if (n == 1) {
      nodes_[id].kind = NodeKind::activity;
      nodes_[id].label = next_label();
      return id;
    }
    Construct c = draw_construct();
    std::size_t k = 2;
    if (c != Construct::loop && n >= 3) k += uniform_index(rng_, 2);
    std::vector<NodeId> children;
    for (std::size_t part : compose(n, k)) children.push_back(expand(part));

    TreeNode& node = nodes_[id];
    switch (c) {
      case Construct::sequence: node.kind = NodeKind::sequence; break;
      case Construct::exclusive: node.kind = NodeKind::exclusive; break;
      case Construct::parallel: node.kind = NodeKind::parallel; break;
      case Construct::inclusive: node.kind = NodeKind::inclusive; break;
      case Construct::loop:
        node.kind = NodeKind::loop;
        node.exit_prob = spec_.loop_exit_prob;
        break;
    }
    if (c == Construct::exclusive && uniform01(rng_) < spec_.p_silent) {
      // Skip branch; appended last so the preorder layout is kept.
      children.push_back(nodes_.size());
      nodes_.emplace_back();
      nodes_.back().kind = NodeKind::silent;
    }
    TreeNode& op = nodes_[id];
    op.children = std::move(children);
    if (c == Construct::exclusive) {
      op.weights = spec_.infrequent_paths ? skewed_weights(op.children.size())
                                          : std::vector<double>(op.children.size(), 1.0);
    } else if (c == Construct::inclusive) {
      op.weights.assign(op.children.size(), 1.0);
    }
    return id;
  }

  std::vector<LongTermDep> draw_dependencies(const ProcessTree& tree) {
    std::vector<NodeId> choices;
    for (NodeId i = 0; i < tree.size(); ++i)
      if (tree.node(i).kind == NodeKind::exclusive) choices.push_back(i);
    std::vector<LongTermDep> deps;
    for (NodeId target : choices) {
      for (NodeId source : choices) {
        if (!ltdep_eligible(tree, source, target)) continue;
        if (uniform01(rng_) >= spec_.p_ltdep) continue;
        LongTermDep d;
        d.source = {source, uniform_index(rng_, tree.node(source).children.size())};
        d.target = {target, uniform_index(rng_, tree.node(target).children.size())};
        deps.push_back(d);
        break;  // one dependency per target
      }
    }
    return deps;
  }
};

}  // namespace

ProcessTree generate_tree(const PopulationSpec& spec, Rng& rng) {
  spec.validate();
  return TreeGenerator(spec, rng).run();
}

std::vector<ProcessTree> sample_models(const PopulationSpec& spec, std::size_t count,
                                       std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample_models: count must be at least 1");
  std::vector<ProcessTree> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, SeedPath{"", "", i, "model"});
    out.push_back(generate_tree(spec, rng));
  }
  return out;
}

}  // namespace pdbench
