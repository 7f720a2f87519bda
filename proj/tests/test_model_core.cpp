#include <set>

#include "doctest.h"
#include "pdbench/compile.hpp"
#include "pdbench/errors.hpp"
#include "pdbench/population.hpp"
#include "pdbench/process_tree.hpp"
#include "pdbench/simulate.hpp"
#include "pdbench/tree_language.hpp"
#include "support.hpp"

using namespace pdbench;
using pdtest::accepts;
using pdtest::tree;

TEST_CASE("tree validation rejects malformed structures") {
  CHECK_THROWS_AS(ProcessTree({}), MalformedTree);
  CHECK_THROWS_AS(tree("->( 'a' )"), MalformedTree);
  CHECK_THROWS_AS(tree("*( 'a', 'b', 'c' )"), MalformedTree);
  CHECK_THROWS_AS(tree("X[1:0]( 'a', 'b' )"), MalformedTree);
  CHECK_THROWS_AS(tree("X[1:1:1]( 'a', 'b' )"), MalformedTree);
  CHECK_THROWS_AS(tree("->( tau, tau )"), MalformedTree);
  CHECK_THROWS_AS(tree("->( 'a', "), ParseError);
  CHECK_NOTHROW(tree("tau"));
}

TEST_CASE("text form round-trips") {
  for (const char* text : {"->( 'a', X[3:1]( 'b', tau ) )", "*[0.25]( 'a', +( 'b', 'c' ) )",
                           "O( 'a', 'b', 'c' )",
                           "->( X( 'a', 'b' ), 'c', X( 'd', 'e' ) )\nltdep 1.0 -> 5.1"}) {
    ProcessTree t = tree(text);
    CHECK(parse_tree(to_text(t)) == t);
  }
}

TEST_CASE("long-term dependency eligibility") {
  ProcessTree t = tree("->( X( 'a', 'b' ), 'c', X( 'd', 'e' ) )");
  CHECK(ltdep_eligible(t, 1, 5));
  CHECK_FALSE(ltdep_eligible(t, 5, 1));
  ProcessTree in_xor = tree("X( X( 'a', 'b' ), X( 'd', 'e' ) )");
  CHECK_FALSE(ltdep_eligible(in_xor, 1, 4));
  CHECK_THROWS_AS(tree("X( X( 'a', 'b' ), X( 'd', 'e' ) )\nltdep 1.0 -> 4.0"), MalformedTree);
}

TEST_CASE("bounded language of small trees") {
  auto lang = [](const char* text, std::size_t unroll = 2) {
    return tree_language_bounded(tree(text), unroll, 100000);
  };
  auto l1 = lang("->( 'a', X( 'b', 'c' ) )");
  CHECK(l1.traces == std::set<Sequence>{{"a", "b"}, {"a", "c"}});
  CHECK_FALSE(l1.truncated);

  auto l2 = lang("*( 'a', 'b' )", 1);
  CHECK(l2.traces == std::set<Sequence>{{"a"}, {"a", "b", "a"}});
  CHECK(l2.truncated);

  auto l3 = lang("O( 'a', 'b' )");
  CHECK(l3.traces == std::set<Sequence>{{"a"}, {"b"}, {"a", "b"}, {"b", "a"}});

  auto l4 = lang("X( 'a', tau )");
  CHECK(l4.traces == std::set<Sequence>{{}, {"a"}});

  auto l5 = lang("->( X( 'a', 'b' ), 'c', X( 'd', 'e' ) )\nltdep 1.0 -> 5.1");
  CHECK(l5.traces == std::set<Sequence>{{"a", "c", "e"}, {"b", "c", "d"}, {"b", "c", "e"}});

  auto capped = tree_language_bounded(tree("+( 'a', 'b', 'c', 'd' )"), 2, 5);
  CHECK(capped.truncated);
  CHECK(capped.traces.size() <= 5);
}

TEST_CASE("compiled nets accept exactly the tree language") {
  SUBCASE("sequence") {
    auto net = compile_tree_to_net(tree("->( 'a', 'b' )"));
    CHECK(pdtest::accepted_up_to(net, {"a", "b"}, 3) == std::set<Sequence>{{"a", "b"}});
  }
  SUBCASE("exclusive") {
    auto net = compile_tree_to_net(tree("X( 'a', 'b' )"));
    CHECK(pdtest::accepted_up_to(net, {"a", "b"}, 3) == std::set<Sequence>{{"a"}, {"b"}});
  }
  SUBCASE("parallel") {
    auto net = compile_tree_to_net(tree("+( 'a', 'b' )"));
    CHECK(pdtest::accepted_up_to(net, {"a", "b"}, 2) ==
          std::set<Sequence>{{"a", "b"}, {"b", "a"}});
  }
  SUBCASE("inclusive") {
    auto net = compile_tree_to_net(tree("O( 'a', 'b' )"));
    CHECK(pdtest::accepted_up_to(net, {"a", "b"}, 3) ==
          std::set<Sequence>{{"a"}, {"b"}, {"a", "b"}, {"b", "a"}});
  }
  SUBCASE("loop") {
    auto net = compile_tree_to_net(tree("*( 'a', 'b' )"));
    CHECK(pdtest::accepted_up_to(net, {"a", "b"}, 5) ==
          std::set<Sequence>{{"a"}, {"a", "b", "a"}, {"a", "b", "a", "b", "a"}});
  }
  SUBCASE("long-term dependency") {
    ProcessTree t = tree("->( X( 'a', 'b' ), 'c', X( 'd', 'e' ) )\nltdep 1.0 -> 5.1");
    auto net = compile_tree_to_net(t);
    CHECK_FALSE(accepts(net, {"a", "c", "d"}));
    CHECK(accepts(net, {"a", "c", "e"}));
    CHECK(pdtest::accepted_up_to(net, {"a", "b", "c", "d", "e"}, 3) ==
          tree_language_bounded(t, 2, 1000).traces);
  }
  SUBCASE("silent-only execution is an empty trace") {
    auto net = compile_tree_to_net(tree("X( 'a', tau )"));
    CHECK(accepts(net, {}));
    CHECK(accepts(net, {"a"}));
    CHECK_FALSE(accepts(net, {"a", "a"}));
  }
}

TEST_CASE("simulated traces replay on the compiled net") {
  PopulationSpec spec;
  spec.p_or = 0.2;
  spec.p_loop = 0.2;
  spec.p_silent = 0.2;
  spec.p_duplicate = 0.2;
  spec.p_ltdep = 0.3;
  spec.size_min = 4;
  spec.size_mode = 8;
  spec.size_max = 14;
  auto models = sample_models(spec, 1000, 77);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    Rng rng(i);
    EventLog log = simulate_log(models[i], 10, rng);
    ReplayEngine engine(compile_tree_to_net(models[i]));
    for (const auto& t : log.traces()) failures += engine.replay(t) != ReplayVerdict::fits;
  }
  CHECK(failures == 0);
}

TEST_CASE("loop-free compiled nets reject strings outside the language") {
  PopulationSpec spec;
  spec.p_or = 0.15;
  spec.p_silent = 0.2;
  spec.p_duplicate = 0.2;
  spec.p_ltdep = 0.3;
  spec.size_min = 3;
  spec.size_mode = 4;
  spec.size_max = 5;
  auto models = sample_models(spec, 60, 5);
  std::size_t disagreements = 0;
  for (const auto& m : models) {
    auto lang = tree_language_bounded(m, 0, 1000000);
    REQUIRE_FALSE(lang.truncated);
    ReplayEngine engine(compile_tree_to_net(m));
    pdtest::for_each_string(m.visible_labels(), 5, [&](const Sequence& s) {
      bool in_lang = lang.traces.count(s) > 0;
      bool fits = engine.replay(s) == ReplayVerdict::fits;
      disagreements += in_lang != fits;
    });
  }
  CHECK(disagreements == 0);
}
