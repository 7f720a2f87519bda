#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "pdbench/compile.hpp"
#include "pdbench/errors.hpp"
#include "pdbench/folds.hpp"
#include "pdbench/noise.hpp"
#include "pdbench/population.hpp"
#include "pdbench/simulate.hpp"
#include "support.hpp"

using namespace pdbench;
using pdtest::tree;

namespace {

EventLog numbered_log(std::size_t n) {
  std::vector<Sequence> s(n, Sequence{"a"});
  return pdtest::log_of(s);
}

Trace trace_of(Sequence s) { return Trace{"c", std::move(s), Provenance::fitting}; }

}  // namespace

TEST_CASE("fold sizes and halves") {
  Rng rng(1);
  FoldPlan p = split_kfold(numbered_log(200), 10, rng);
  REQUIRE(p.folds.size() == 10);
  for (const auto& f : p.folds) {
    CHECK(f.fitting_test.size() == 10);
    CHECK(f.to_noise.size() == 10);
    CHECK(f.training.size() == 180);
  }

  FoldPlan q = split_kfold(numbered_log(205), 10, rng);
  std::map<std::size_t, std::size_t> sizes;
  for (const auto& f : q.folds) {
    std::size_t n = f.fitting_test.size() + f.to_noise.size();
    ++sizes[n];
    CHECK(f.fitting_test.size() >= f.to_noise.size());
    CHECK(f.fitting_test.size() - f.to_noise.size() <= 1);
  }
  CHECK(sizes == std::map<std::size_t, std::size_t>{{20, 5}, {21, 5}});

  CHECK_THROWS_AS(split_kfold(numbered_log(200), 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(split_kfold(numbered_log(19), 10, rng), TooSmall);
}

TEST_CASE("folds partition the log") {
  for (std::size_t n : {20u, 37u, 200u, 999u}) {
    Rng rng(n);
    FoldPlan p = split_kfold(numbered_log(n), 10, rng);
    std::vector<std::size_t> seen(n, 0);
    for (std::size_t f = 0; f < p.folds.size(); ++f) {
      const auto& fold = p.folds[f];
      std::set<std::size_t> test(fold.fitting_test.begin(), fold.fitting_test.end());
      test.insert(fold.to_noise.begin(), fold.to_noise.end());
      for (std::size_t i : test) {
        ++seen[i];
        CHECK(p.assignment[i] == f);
      }
      CHECK(fold.training.size() + test.size() == n);
      for (std::size_t i : fold.training) CHECK(test.count(i) == 0);
      CHECK(std::is_sorted(fold.training.begin(), fold.training.end()));
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](std::size_t c) { return c == 1; }));
  }
}

TEST_CASE("fold plans are reproducible and serializable") {
  Rng a(42), b(42);
  FoldPlan p = split_kfold(numbered_log(57), 10, a);
  CHECK(p == split_kfold(numbered_log(57), 10, b));
  CHECK(parse_fold_plan(to_json(p)) == p);
}

TEST_CASE("single noise edits") {
  Rng rng(3);
  CHECK(apply_noise_once(trace_of({"a", "b"}), NoiseType::swap_consecutive, {}, rng).events ==
        Sequence{"b", "a"});
  CHECK(apply_noise_once(trace_of({"a"}), NoiseType::duplicate, {}, rng).events ==
        Sequence{"a", "a"});
  CHECK_THROWS_AS(apply_noise_once(trace_of({"a"}), NoiseType::swap_random, {}, rng), Inapplicable);
  CHECK_THROWS_AS(apply_noise_once(trace_of({}), NoiseType::remove, {}, rng), Inapplicable);

  auto added = apply_noise_once(trace_of({"a"}), NoiseType::add, {"z"}, rng).events;
  CHECK(added.size() == 2);
  CHECK(std::count(added.begin(), added.end(), "z") == 1);

  auto swapped = apply_noise_once(trace_of({"a", "b", "c"}), NoiseType::swap_random, {}, rng).events;
  auto sorted = swapped;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == Sequence{"a", "b", "c"});
  CHECK(swapped != Sequence{"a", "b", "c"});
}

TEST_CASE("remove picks positions uniformly") {
  Rng rng(9);
  std::map<Sequence, std::size_t> counts;
  for (int i = 0; i < 3000; ++i)
    ++counts[apply_noise_once(trace_of({"a", "b", "c"}), NoiseType::remove, {}, rng).events];
  REQUIRE(counts.size() == 3);
  for (const auto& [seq, c] : counts) CHECK(std::abs(static_cast<double>(c) / 3000.0 - 1.0 / 3.0) <= 0.03);
}

TEST_CASE("noised traces never fit the ground truth") {
  SUBCASE("sequence model") {
    ProcessTree t = tree("->( 'a', 'b', 'c' )");
    Rng rng(2);
    auto out = make_nonfitting({trace_of({"a", "b", "c"})}, {}, t, NoiseOptions{}, rng);
    REQUIRE(out.size() == 1);
    CHECK(out[0].trace.provenance == Provenance::noised);
    CHECK_FALSE(pdtest::accepts(compile_tree_to_net(t), out[0].trace.events));
    CHECK(out[0].rounds >= 1);
  }
  SUBCASE("model accepting every string exhausts the pool") {
    ProcessTree t = tree("*( X( 'a', 'b', tau ), tau )");
    Rng rng(2);
    std::vector<Trace> pool{trace_of({"a"}), trace_of({"b", "a"})};
    CHECK_THROWS_AS(make_nonfitting({trace_of({"a", "b"})}, pool, t, NoiseOptions{}, rng),
                    PoolExhausted);
  }
  SUBCASE("random loop-free models") {
    PopulationSpec s;
    s.p_duplicate = 0.2;
    s.p_silent = 0.1;
    auto models = sample_models(s, 20, 17);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      Rng rng(i);
      EventLog log = simulate_log(models[i], 60, rng);
      std::vector<Trace> half(log.traces().begin(), log.traces().begin() + 10);
      std::vector<Trace> pool(log.traces().begin() + 10, log.traces().end());
      PetriNet net = compile_tree_to_net(models[i]);
      ReplayEngine engine(net);
      std::vector<NoisedTrace> out;
      try {
        out = make_nonfitting(half, pool, net, models[i].visible_labels(), NoiseOptions{}, rng);
      } catch (const PoolExhausted&) {
        continue;
      }
      CHECK(out.size() == half.size());
      for (const auto& n : out) {
        CHECK(engine.replay(n.trace) == ReplayVerdict::not_fits);
        CHECK(n.rounds <= 5);
        ++checked;
      }
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("noise is reproducible") {
  ProcessTree t = tree("->( 'a', X( 'b', 'c' ), +( 'd', 'e' ) )");
  Rng sim(1);
  EventLog log = simulate_log(t, 30, sim);
  std::vector<Trace> half(log.traces().begin(), log.traces().begin() + 10);
  std::vector<Trace> pool(log.traces().begin() + 10, log.traces().end());
  Rng a(5), b(5);
  auto x = make_nonfitting(half, pool, t, NoiseOptions{}, a);
  auto y = make_nonfitting(half, pool, t, NoiseOptions{}, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].trace == y[i].trace);
}
