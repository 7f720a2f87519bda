#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "doctest.h"
#include "pdbench/errors.hpp"
#include "pdbench/population.hpp"
#include "pdbench/tree_language.hpp"

using namespace pdbench;

namespace {

std::array<std::size_t, 5> operator_counts(const ProcessTree& t) {
  std::array<std::size_t, 5> c{};
  for (const auto& n : t.nodes()) {
    switch (n.kind) {
      case NodeKind::sequence: ++c[0]; break;
      case NodeKind::exclusive: ++c[1]; break;
      case NodeKind::parallel: ++c[2]; break;
      case NodeKind::inclusive: ++c[3]; break;
      case NodeKind::loop: ++c[4]; break;
      default: break;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("construct probabilities normalize to the population shares") {
  auto p = normalize_construct_probs({0.95, 0.74, 0.40, 0.0, 0.0});
  CHECK(std::abs(p[0] - 0.454) <= 0.005);
  CHECK(std::abs(p[1] - 0.354) <= 0.005);
  CHECK(std::abs(p[2] - 0.191) <= 0.005);
  CHECK(p[3] == 0.0);
  CHECK(p[4] == 0.0);

  CHECK(normalize_construct_probs({1, 0, 0, 0, 0}) == ConstructProbs{1, 0, 0, 0, 0});
  CHECK(normalize_construct_probs({2, 2, 0, 0, 0}) == ConstructProbs{0.5, 0.5, 0, 0, 0});
  CHECK_THROWS_AS(normalize_construct_probs({0, 0, 0, 0, 0}), AllZero);
  CHECK_THROWS_AS(normalize_construct_probs({1, -1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("triangular size draws") {
  Rng rng(1);
  PopulationSpec s;
  s.size_min = s.size_mode = s.size_max = 10;
  CHECK(sample_size(s, rng) == 10);

  s.size_min = 5;
  s.size_mode = 10;
  s.size_max = 15;
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += static_cast<double>(sample_size(s, rng));
  CHECK(std::abs(sum / 10000.0 - 10.0) <= 0.3);

  s.size_min = 1;
  s.size_mode = 1;
  s.size_max = 2;
  for (int i = 0; i < 200; ++i) {
    auto v = sample_size(s, rng);
    CHECK((v == 1 || v == 2));
  }
}

TEST_CASE("invalid population specs are rejected") {
  PopulationSpec s;
  s.size_min = 0;
  CHECK_THROWS_AS(s.validate(), InfeasibleSpec);
  s = PopulationSpec{};
  s.size_mode = 40;
  CHECK_THROWS_AS(s.validate(), InfeasibleSpec);
  s = PopulationSpec{};
  s.p_duplicate = 1.5;
  CHECK_THROWS_AS(s.validate(), InfeasibleSpec);
  s = PopulationSpec{};
  s.p_seq = s.p_xor = s.p_and = 0.0;
  CHECK_THROWS_AS(s.validate(), InfeasibleSpec);
}

TEST_CASE("degenerate sequence population") {
  PopulationSpec s;
  s.p_xor = s.p_and = 0.0;
  s.p_seq = 1.0;
  s.size_min = s.size_mode = s.size_max = 3;
  Rng rng(3);
  auto lang = tree_language_bounded(generate_tree(s, rng), 2, 100);
  REQUIRE(lang.traces.size() == 1);
  CHECK(lang.traces.begin()->size() == 3);
}

TEST_CASE("operator type frequencies") {
  PopulationSpec s;
  s.p_seq = s.p_and = 0.0;
  s.p_xor = 1.0;
  s.size_min = s.size_mode = s.size_max = 4;
  auto xs = sample_models(s, 5000, 11);
  std::size_t xor_nodes = 0, ops = 0;
  for (const auto& t : xs) {
    auto c = operator_counts(t);
    xor_nodes += c[1];
    for (auto v : c) ops += v;
  }
  CHECK(xor_nodes == ops);

  s.p_seq = 0.5;
  s.p_xor = 0.5;
  auto mixed = sample_models(s, 5000, 12);
  std::size_t seq = 0;
  ops = 0;
  for (const auto& t : mixed) {
    auto c = operator_counts(t);
    seq += c[0];
    for (auto v : c) ops += v;
  }
  CHECK(std::abs(static_cast<double>(seq) / static_cast<double>(ops) - 0.5) <= 0.03);

  // Default population: every type within 0.02 of its share.
  PopulationSpec d;
  d.p_or = 0.2;
  d.p_loop = 0.2;
  auto expected = normalize_construct_probs(d.raw_construct_probs());
  std::array<std::size_t, 5> totals{};
  std::size_t all = 0;
  for (const auto& t : sample_models(d, 600, 13)) {
    auto c = operator_counts(t);
    for (std::size_t i = 0; i < 5; ++i) {
      totals[i] += c[i];
      all += c[i];
    }
  }
  REQUIRE(all >= 5000);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(static_cast<double>(totals[i]) / static_cast<double>(all) - expected[i]) < 0.02);
}

TEST_CASE("visible activity counts stay inside the size range") {
  PopulationSpec s;
  s.p_silent = 0.3;
  s.p_loop = 0.1;
  s.p_duplicate = 0.2;
  for (const auto& t : sample_models(s, 500, 21)) {
    CHECK(t.visible_count() >= s.size_min);
    CHECK(t.visible_count() <= s.size_max);
  }
}

TEST_CASE("duplicate label rate") {
  PopulationSpec s;
  auto duplicate_share = [](const std::vector<ProcessTree>& ts, std::size_t& labels) {
    std::size_t dup = 0;
    labels = 0;
    for (const auto& t : ts) {
      std::set<std::string> seen;
      for (const auto& n : t.nodes()) {
        if (n.kind != NodeKind::activity) continue;
        ++labels;
        if (!seen.insert(n.label).second) ++dup;
      }
    }
    return static_cast<double>(dup) / static_cast<double>(labels);
  };
  std::size_t labels = 0;
  CHECK(duplicate_share(sample_models(s, 300, 1), labels) == 0.0);

  for (double p : {0.1, 0.2, 0.3}) {
    s.p_duplicate = p;
    double share = duplicate_share(sample_models(s, 500, 2), labels);
    REQUIRE(labels >= 5000);
    CHECK(std::abs(share - p) <= 0.02);
  }
}

TEST_CASE("infrequent paths skew exclusive weights") {
  PopulationSpec s;
  s.infrequent_paths = true;
  s.p_silent = 0.2;
  std::size_t binary = 0;
  for (const auto& t : sample_models(s, 300, 8)) {
    for (const auto& n : t.nodes()) {
      if (n.kind != NodeKind::exclusive) continue;
      double sum = 0.0, top = 0.0;
      for (double w : n.weights) {
        sum += w;
        top = std::max(top, w);
      }
      CHECK(sum == doctest::Approx(1.0));
      if (n.weights.size() == 2) {
        ++binary;
        CHECK(top >= 0.75);
      }
    }
  }
  CHECK(binary > 0);
}

TEST_CASE("model samples are reproducible") {
  PopulationSpec s;
  s.p_duplicate = 0.2;
  auto a = sample_models(s, 62, 99);
  auto b = sample_models(s, 62, 99);
  REQUIRE(a.size() == 62);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_text(a[i]) == to_text(b[i]));
  CHECK(to_text(sample_models(s, 1, 100)[0]) != to_text(a[0]));
  CHECK_THROWS(sample_models(s, 0, 1));
}

TEST_CASE("activity names") {
  CHECK(activity_name(0) == "a");
  CHECK(activity_name(25) == "z");
  CHECK(activity_name(26) == "aa");
  CHECK(activity_name(27) == "ab");
}
