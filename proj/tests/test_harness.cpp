#include <filesystem>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "pdbench/analysis.hpp"
#include "pdbench/errors.hpp"
#include "pdbench/experiment.hpp"
#include "pdbench/random.hpp"
#include "pdbench/reports.hpp"

using namespace pdbench;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "seed": 7,
  "models_per_cell": 2,
  "log_size_min": 40,
  "log_size_max": 60,
  "k_folds": 4,
  "miners": ["inductive_basic", "flower"],
  "population": { "size_min": 5, "size_mode": 7, "size_max": 9 },
  "cells": [
    { "id": "d0", "factors": { "p_duplicate": 0.0 } },
    { "id": "d2", "factors": { "p_duplicate": 0.2 } }
  ],
  "trend_factor": "p_duplicate"
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pdbench_test_" + name);
  fs::remove_all(p);
  return p;
}

RunRecord synthetic(const std::string& cell, const std::string& miner, std::size_t id, double f1v) {
  RunRecord r;
  r.cell_id = cell;
  r.miner = miner;
  r.model_id = id;
  r.log_id = cell + miner + std::to_string(id);
  FoldResult f;
  f.matrix = {5, 0, 5, 10};
  f.precision = 1.0;
  f.recall = f1v;
  f.f1 = f1v;
  r.folds.assign(2, f);
  refresh_averages(r, UndefinedPolicy::exclude);
  return r;
}

}  // namespace

TEST_CASE("seed derivation") {
  SeedPath p{"cell", "miner", 3, "log"};
  CHECK(derive_seed(1, p) == derive_seed(1, p));
  SeedPath q = p;
  q.stage = "model";
  CHECK(derive_seed(1, p) != derive_seed(1, q));
  CHECK(derive_seed(1, p) != derive_seed(2, p));
  // Component boundaries matter: ("ab","c") and ("a","bc") differ.
  CHECK(derive_seed(1, {"ab", "c", 0, "x"}) != derive_seed(1, {"a", "bc", 0, "x"}));

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1000000);
  std::size_t collisions = 0;
  const char* stages[] = {"model", "log", "folds", "noise/0"};
  for (std::uint64_t m = 0; m < 250000; ++m)
    for (const char* s : stages) collisions += !seen.insert(derive_seed(42, {"c", "m", m, s})).second;
  CHECK(seen.size() + collisions == 1000000);
  CHECK(collisions == 0);
}

TEST_CASE("config parsing") {
  ExperimentConfig c = parse_config(kSmall);
  CHECK(c.seed == 7);
  CHECK(c.k_folds == 4);
  CHECK(c.noise_prob == doctest::Approx(1.0 / 3.0));
  CHECK(c.replay.state_budget == 200000);
  CHECK(c.replay.token_bound == 8);
  REQUIRE(c.cells.size() == 2);
  CHECK(c.cells[1].population.p_duplicate == 0.2);
  CHECK(c.cells[1].population.size_max == 9);
  CHECK_NOTHROW(validate_config(c));

  ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_fingerprint(back) == config_fingerprint(c));
  back.workers = 8;
  back.output_dir = "elsewhere";
  CHECK(config_fingerprint(back) == config_fingerprint(c));
  back.seed = 8;
  CHECK(config_fingerprint(back) != config_fingerprint(c));

  ExperimentConfig defaults = parse_config(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x"}]})");
  CHECK(defaults.models_per_cell == 62);
  CHECK(defaults.log_size_min == 200);
  CHECK(defaults.log_size_max == 1000);
  CHECK(defaults.k_folds == 10);

  CHECK_THROWS_AS(parse_config(R"({"miners": ["flower"], "cells": [{"id": "x"}]})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x"}], "bogus": 1})"),
                  ConfigInvalid);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x",
      "factors": {"p_duplicate": 0.1}, "population": {"p_duplicate": 0.2}}]})"),
                  ConfigInvalid);

  auto invalid = [](const std::string& json) {
    CHECK_THROWS_AS(validate_config(parse_config(json)), ConfigInvalid);
  };
  invalid(R"({"seed": 1, "miners": ["nope"], "cells": [{"id": "x"}]})");
  invalid(R"({"seed": 1, "miners": ["ilp"], "cells": [{"id": "x"}]})");
  invalid(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x"}], "models_per_cell": 0})");
  invalid(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x"}, {"id": "x"}]})");
  invalid(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x"}], "k_folds": 1})");
  invalid(R"({"seed": 1, "miners": ["flower"], "cells": [{"id": "x/y"}]})");
  invalid(R"({"seed": 1, "miners": [{"name": "flower", "parameters": {"a": 1}}], "cells": [{"id": "x"}]})");
}

TEST_CASE("factorial grid size") {
  ExperimentConfig c = parse_config(read_file(fs::path(PDBENCH_SOURCE_DIR) / "configs" / "table1.json"));
  CHECK_NOTHROW(validate_config(c));
  CHECK(c.miners.size() == 4);
  CHECK(c.cells.size() == 14);
  CHECK(c.models_per_cell == 62);
  CHECK(c.cells.size() * c.miners.size() * c.models_per_cell == 3472);
}

TEST_CASE("experiment pipeline, reports and resume") {
  ExperimentConfig c = parse_config(kSmall);
  fs::path dir = scratch("pipeline");
  c.output_dir = dir.string();
  auto records = run_experiment(c);
  REQUIRE(records.size() == 8);
  CHECK_NOTHROW(check_independence(records));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    CHECK(std::tie(a.cell_id, a.miner, a.model_id) < std::tie(b.cell_id, b.miner, b.model_id));
  }
  for (const auto& r : records) {
    if (r.status != RunStatus::ok) continue;
    CHECK(r.folds.size() == 4);
    CHECK(r.log_size >= 40);
    CHECK(r.log_size <= 60);
  }

  for (const char* f : {"runs.csv", "aggregate.csv", "stats.json", "stats.txt", "summary.csv",
                        "summary_f1.svg", "manifest.json"})
    CHECK(fs::exists(dir / f));
  std::string csv = read_file(dir / "runs.csv");
  CHECK(csv.rfind(std::string(kRunsHeader) + "\n", 0) == 0);

  // runs.csv reparses into the same fold matrices and averages.
  auto parsed = parse_runs_csv(csv, c.undefined_metrics);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].log_id == records[i].log_id);
    CHECK(parsed[i].status == records[i].status);
    REQUIRE(parsed[i].folds.size() == records[i].folds.size());
    for (std::size_t f = 0; f < parsed[i].folds.size(); ++f)
      CHECK(parsed[i].folds[f].matrix == records[i].folds[f].matrix);
    CHECK(parsed[i].averaged.f1 == records[i].averaged.f1);
  }
  CHECK(runs_csv(parsed) == csv);

  // Interrupted run: drop some persisted records and the reports, then resume.
  fs::remove(dir / "runs" / "d2" / "flower" / "1.json");
  fs::remove(dir / "runs" / "d0" / "inductive_basic" / "0.json");
  fs::remove(dir / "runs.csv");
  std::size_t executed = 0;
  ExecutionOptions resume;
  resume.resume = true;
  resume.progress = [&](std::size_t, std::size_t) { ++executed; };
  auto again = run_experiment(c, resume);
  CHECK(executed == 2);
  CHECK(read_file(dir / "runs.csv") == csv);

  ExperimentConfig changed = c;
  changed.seed = 99;
  CHECK_THROWS_AS(run_experiment(changed, resume), ConfigInvalid);

  // Worker count does not change the outputs.
  ExperimentConfig threaded = c;
  threaded.output_dir = scratch("threads").string();
  threaded.workers = 3;
  run_experiment(threaded);
  CHECK(read_file(fs::path(threaded.output_dir) / "runs.csv") == csv);

  fs::remove_all(dir);
  fs::remove_all(threaded.output_dir);
}

TEST_CASE("run records survive JSON") {
  ExperimentConfig c = parse_config(kSmall);
  RunRecord r = execute_run(c, c.cells[0], "flower", 0,
                            registry_discoverer(MinerSpec{"flower", {}}));
  RunRecord back = run_record_from_json(run_record_to_json(r), UndefinedPolicy::exclude);
  CHECK(run_record_to_json(back) == run_record_to_json(r));
  CHECK(back.model_seed == r.model_seed);
  CHECK(back.folds.size() == r.folds.size());
}

TEST_CASE("independence check") {
  std::vector<RunRecord> rs{synthetic("a", "m", 0, 0.5), synthetic("a", "m", 1, 0.5)};
  CHECK_NOTHROW(check_independence(rs));
  rs[1].log_id = rs[0].log_id;
  CHECK_THROWS_AS(check_independence(rs), Error);
}

TEST_CASE("failed runs in the CSV") {
  RunRecord ok = synthetic("a", "m", 0, 0.5);
  RunRecord bad;
  bad.cell_id = "a";
  bad.miner = "m";
  bad.model_id = 1;
  bad.log_id = "00000000000000ff";
  bad.status = RunStatus::miner_failed;
  std::string csv = runs_csv({ok, bad});
  CHECK(csv.find("00000000000000ff,,,,,,,,,,miner-failed") != std::string::npos);
  auto back = parse_runs_csv(csv, UndefinedPolicy::exclude);
  REQUIRE(back.size() == 2);
  CHECK(back[1].status == RunStatus::miner_failed);
  CHECK(back[1].folds.empty());

  ExperimentConfig c = parse_config(R"({"seed": 1, "miners": ["m"], "cells": [{"id": "a"}]})");
  CHECK(*run_metric(ok, MetricKind::f1, FailurePolicy::exclude) == 0.5);
  CHECK_FALSE(run_metric(bad, MetricKind::f1, FailurePolicy::exclude).has_value());
  CHECK(*run_metric(bad, MetricKind::f1, FailurePolicy::zero) == 0.0);
}

TEST_CASE("trend series across duplicate levels") {
  ExperimentConfig c;
  c.trend_factor = "p_duplicate";
  c.miners = {MinerSpec{"good", {}}, MinerSpec{"flat", {}}};
  std::vector<RunRecord> records;
  const std::vector<double> levels{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  for (double infrequent : {0.0, 1.0}) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      CellSpec cell;
      cell.id = "i" + std::to_string(static_cast<int>(infrequent)) + "_d" + std::to_string(l);
      cell.factors = {{"p_duplicate", levels[l]}, {"infrequent_paths", infrequent}};
      c.cells.push_back(cell);
      for (std::size_t m = 0; m < 6; ++m) {
        records.push_back(synthetic(cell.id, "good", m, 0.95 - 0.1 * static_cast<double>(l) -
                                                            0.01 * static_cast<double>(m)));
        records.push_back(synthetic(cell.id, "flat", m, 0.5 + 0.01 * static_cast<double>((m * 7 + l) % 5)));
      }
    }
  }
  StatsReport report = analyze(records, c);
  REQUIRE(report.metrics.size() == 3);
  const MetricAnalysis& f1m = report.metrics[2];
  CHECK(f1m.metric == MetricKind::f1);
  CHECK(f1m.trends.size() == 4);  // two panels x two miners
  for (const auto& t : f1m.trends) {
    CHECK(t.levels == levels);
    if (t.miner == "good") CHECK(t.direction == "decreasing");
    else CHECK(t.direction == "none");
  }
  CHECK(f1m.comparisons.size() == c.cells.size() + 1);
  CHECK(panel_of(c.cells[0], "p_duplicate") == "infrequent_paths=0");

  std::string summary = summary_csv(records, c);
  CHECK(summary.rfind("panel,miner,p_duplicate,runs,n_f1,mean_precision,mean_recall,mean_f1\n", 0) == 0);
  CHECK(summary_svg(records, c).find("<svg") != std::string::npos);
  CHECK(stats_text(report).find("KW = ") != std::string::npos);
}

TEST_CASE("I/O errors carry the path") {
  try {
    read_file("/nonexistent/dir/file.csv");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path() == "/nonexistent/dir/file.csv");
  }
}
