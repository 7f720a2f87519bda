#include <map>

#include "doctest.h"
#include "pdbench/errors.hpp"
#include "pdbench/event_log.hpp"
#include "pdbench/population.hpp"
#include "pdbench/simulate.hpp"
#include "support.hpp"

using namespace pdbench;
using pdtest::tree;

TEST_CASE("exclusive branch frequencies follow the weights") {
  Rng rng(4);
  EventLog log = simulate_log(tree("X[9:1]( 'a', 'b' )"), 1000, rng);
  std::size_t a = 0;
  for (const auto& t : log.traces()) a += t.events == Sequence{"a"};
  CHECK(std::abs(static_cast<double>(a) / 1000.0 - 0.9) <= 0.03);
}

TEST_CASE("sequence yields a single variant") {
  Rng rng(5);
  EventLog log = simulate_log(tree("->( 'a', 'b', 'c' )"), 50, rng);
  CHECK(log.size() == 50);
  for (const auto& t : log.traces()) CHECK(t.events == Sequence{"a", "b", "c"});
  CHECK(log.alphabet() == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("parallel interleavings are balanced") {
  Rng rng(6);
  EventLog log = simulate_log(tree("+( 'a', 'b' )"), 2000, rng);
  std::size_t ab = 0;
  for (const auto& t : log.traces()) ab += t.events == Sequence{"a", "b"};
  CHECK(std::abs(static_cast<double>(ab) / 2000.0 - 0.5) <= 0.04);
  CHECK(log.variants().size() == 2);
}

TEST_CASE("loops respect the iteration cap") {
  Rng rng(7);
  SimulationOptions opts;
  opts.max_loop_iterations = 3;
  EventLog log = simulate_log(tree("*[0.01]( 'a', 'b' )"), 100, rng, opts);
  for (const auto& t : log.traces()) CHECK(t.events.size() <= 7);
}

TEST_CASE("case ids and provenance") {
  Rng rng(8);
  EventLog log = simulate_log(tree("'a'"), 3, rng);
  std::set<std::string> ids;
  for (const auto& t : log.traces()) {
    ids.insert(t.case_id);
    CHECK(t.provenance == Provenance::fitting);
  }
  CHECK(ids.size() == 3);
}

TEST_CASE("completeness ratio") {
  ProcessTree t = tree("->( 'a', X( 'b', 'c' ) )");
  auto both = completeness(pdtest::log_of({{"a", "b"}, {"a", "c"}, {"a", "b"}}), t);
  CHECK(both.ratio == 1.0);
  CHECK_FALSE(both.lower_bound);
  auto half = completeness(pdtest::log_of({{"a", "b"}}), t);
  CHECK(half.ratio == 0.5);
  CHECK(half.language_size == 2);
  CHECK(half.observed == 1);

  auto loop = completeness(pdtest::log_of({{"a"}}), tree("*( 'a', 'b' )"), 1);
  CHECK(loop.lower_bound);
}

TEST_CASE("completeness grows with the log") {
  PopulationSpec s;
  s.size_min = 5;
  s.size_mode = 8;
  s.size_max = 12;
  auto models = sample_models(s, 40, 31);
  for (std::size_t i = 0; i < models.size(); ++i) {
    Rng rng(100 + i);
    EventLog big = simulate_log(models[i], 1000, rng);
    std::vector<std::size_t> first(200);
    for (std::size_t j = 0; j < 200; ++j) first[j] = j;
    EventLog prefix = big.subset(first);
    CHECK(completeness(big, models[i]).ratio >= completeness(prefix, models[i]).ratio);
  }
}

TEST_CASE("log serialization") {
  EventLog log = pdtest::log_of({{"a", "b"}, {}, {"x\"y"}});
  EventLog back = parse_jsonl(to_jsonl(log));
  CHECK(back.traces() == log.traces());
  std::string xes = to_xes(log);
  CHECK(xes.find("concept:name") != std::string::npos);
  CHECK(xes.find("x&quot;y") != std::string::npos);
}
