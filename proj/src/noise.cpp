#include "pdbench/noise.hpp"

#include <numeric>
#include <optional>

#include "pdbench/compile.hpp"
#include "pdbench/errors.hpp"

namespace pdbench {

const char* to_string(NoiseType t) {
  switch (t) {
    case NoiseType::add: return "add";
    case NoiseType::duplicate: return "duplicate";
    case NoiseType::remove: return "remove";
    case NoiseType::swap_consecutive: return "swap-consecutive";
    case NoiseType::swap_random: return "swap-random";
  }
  return "?";
}

bool noise_applicable(NoiseType type, const Trace& trace, std::size_t alphabet_size) {
  switch (type) {
    case NoiseType::add: return alphabet_size > 0;
    case NoiseType::duplicate:
    case NoiseType::remove: return !trace.events.empty();
    case NoiseType::swap_consecutive:
    case NoiseType::swap_random: return trace.events.size() >= 2;
  }
  return false;
}

Trace apply_noise_once(const Trace& trace, NoiseType type,
                       const std::vector<std::string>& alphabet, Rng& rng) {
  if (!noise_applicable(type, trace, alphabet.size()))
    throw Inapplicable(std::string("noise '") + to_string(type) +
                       "' does not apply to a trace of length " +
                       std::to_string(trace.events.size()));
  Trace out = trace;
  auto& ev = out.events;
  auto at = [&](std::size_t i) { return ev.begin() + static_cast<std::ptrdiff_t>(i); };
  switch (type) {
    case NoiseType::add: {
      const std::string& label = alphabet[uniform_index(rng, alphabet.size())];
      ev.insert(at(uniform_index(rng, ev.size() + 1)), label);
      break;
    }
    case NoiseType::duplicate: {
      std::size_t i = uniform_index(rng, ev.size());
      ev.insert(at(i + 1), ev[i]);
      break;
    }
    case NoiseType::remove:
      ev.erase(at(uniform_index(rng, ev.size())));
      break;
    case NoiseType::swap_consecutive: {
      std::size_t i = uniform_index(rng, ev.size() - 1);
      std::swap(ev[i], ev[i + 1]);
      break;
    }
    case NoiseType::swap_random: {
      std::size_t i = uniform_index(rng, ev.size());
      std::size_t j = uniform_index(rng, ev.size() - 1);
      if (j >= i) ++j;
      std::swap(ev[i], ev[j]);
      break;
    }
  }
  return out;
}

namespace {

std::optional<NoisedTrace> noise_until_rejected(const Trace& source,
                                                const ReplayEngine& engine,
                                                const std::vector<std::string>& alphabet,
                                                const NoiseOptions& options, Rng& rng) {
  Trace cur = source;
  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    std::vector<NoiseType> selected;
    for (NoiseType t : kNoiseTypes)
      if (uniform01(rng) < options.noise_prob) selected.push_back(t);
    bool any = false;
    for (NoiseType t : selected)
      if (noise_applicable(t, cur, alphabet.size())) any = true;
    if (!any) {
      std::vector<NoiseType> candidates;
      for (NoiseType t : kNoiseTypes)
        if (noise_applicable(t, cur, alphabet.size())) candidates.push_back(t);
      if (candidates.empty()) return std::nullopt;
      selected = {candidates[uniform_index(rng, candidates.size())]};
    }
    for (NoiseType t : selected) {
      // Earlier edits of this round may have made a type inapplicable.
      if (noise_applicable(t, cur, alphabet.size()))
        cur = apply_noise_once(cur, t, alphabet, rng);
    }
    if (engine.replay(cur) == ReplayVerdict::not_fits) {
      NoisedTrace out;
      out.trace = std::move(cur);
      out.trace.case_id = source.case_id + "-noised";
      out.trace.provenance = Provenance::noised;
      out.source = source;
      out.rounds = round;
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<NoisedTrace> make_nonfitting(const std::vector<Trace>& test_half,
                                         const std::vector<Trace>& pool,
                                         const PetriNet& ground_truth,
                                         const std::vector<std::string>& alphabet,
                                         const NoiseOptions& options, Rng& rng) {
  ReplayEngine engine(ground_truth, options.replay);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle_in_place(order, rng);
  std::size_t next = 0;

  std::vector<NoisedTrace> out;
  out.reserve(test_half.size());
  for (const Trace& t : test_half) {
    const Trace* source = &t;
    while (true) {
      if (auto noised = noise_until_rejected(*source, engine, alphabet, options, rng)) {
        out.push_back(std::move(*noised));
        break;
      }
      if (next >= order.size())
        throw PoolExhausted("no replacement trace left after " + std::to_string(out.size()) +
                            " of " + std::to_string(test_half.size()) + " noised traces");
      source = &pool[order[next++]];
    }
  }
  return out;
}

std::vector<NoisedTrace> make_nonfitting(const std::vector<Trace>& test_half,
                                         const std::vector<Trace>& pool,
                                         const ProcessTree& tree,
                                         const NoiseOptions& options, Rng& rng) {
  return make_nonfitting(test_half, pool, compile_tree_to_net(tree), tree.visible_labels(),
                         options, rng);
}

}  // namespace pdbench
