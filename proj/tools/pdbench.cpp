// Command-line front end: generate | run | stats | report.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdbench/analysis.hpp"
#include "pdbench/compile.hpp"
#include "pdbench/errors.hpp"
#include "pdbench/experiment.hpp"
#include "pdbench/reports.hpp"

namespace fs = std::filesystem;
using namespace pdbench;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
  bool resume = false;
};

ExperimentConfig load_config(const CommonFlags& f) {
  ExperimentConfig c = parse_config(read_file(f.config));
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

// Config for re-analysis: an explicit --config wins, otherwise the copy stored
// in the output directory's manifest.
ExperimentConfig analysis_config(const CommonFlags& f, const fs::path& dir) {
  if (!f.config.empty()) {
    ExperimentConfig c = parse_config(read_file(f.config));
    c.output_dir = dir.string();
    return c;
  }
  auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("config"))
    throw IoError((dir / "manifest.json").string(), "no embedded config");
  ExperimentConfig c = parse_config(manifest["config"].dump());
  c.output_dir = dir.string();
  return c;
}

int cmd_generate(const CommonFlags& f) {
  ExperimentConfig c = load_config(f);
  validate_config(c);
  fs::path dir = fs::path(c.output_dir) / "generated";
  std::string index = "cell_id,miner,model_id,log_id,model_size,log_size,variants,completeness\n";
  for (const auto& cell : c.cells)
    for (const auto& miner : c.miners)
      for (std::size_t m = 0; m < c.models_per_cell; ++m) {
        RunData d = generate_run_data(c, cell, miner.name, m);
        fs::path base = dir / cell.id / miner.name / std::to_string(m);
        write_file(base.string() + ".tree", to_text(d.model) + "\n");
        write_file(base.string() + ".pnml", to_pnml(compile_tree_to_net(d.model), std::to_string(m)));
        write_file(base.string() + ".jsonl", to_jsonl(d.log));
        write_file(base.string() + ".xes", to_xes(d.log));
        std::string comp;
        if (c.completeness_max_traces > 0) {
          try {
            comp = format_double(completeness(d.log, d.model, 2, c.completeness_max_traces).ratio);
          } catch (const EmptyLanguage&) {
          }
        }
        index += cell.id + ',' + miner.name + ',' + std::to_string(m) + ',' +
                 format_log_id(d.log_seed) + ',' + std::to_string(d.model.visible_count()) + ',' +
                 std::to_string(d.log.size()) + ',' + std::to_string(d.log.variants().size()) + ',' +
                 comp + '\n';
      }
  write_file(dir / "index.csv", index);
  std::cout << "wrote " << (dir / "index.csv").string() << "\n";
  return 0;
}

int cmd_run(const CommonFlags& f) {
  ExperimentConfig c = load_config(f);
  ExecutionOptions opts;
  opts.resume = f.resume;
  opts.progress = [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r%zu/%zu runs", done, total);
    if (done == total) std::fputc('\n', stderr);
  };
  auto records = run_experiment(c, opts);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status != RunStatus::ok;
  std::cout << records.size() << " runs (" << failed << " failed) written to " << c.output_dir << "\n";
  return 0;
}

int cmd_stats(const CommonFlags& f) {
  fs::path dir = f.out.empty() ? fs::path("out") : fs::path(f.out);
  ExperimentConfig c = analysis_config(f, dir);
  auto records = parse_runs_csv(read_file(dir / "runs.csv"), c.undefined_metrics);
  StatsReport report = analyze(records, c);
  write_file(dir / "stats.json", stats_json(report));
  std::string text = stats_text(report);
  write_file(dir / "stats.txt", text);
  std::cout << text;
  return 0;
}

int cmd_report(const CommonFlags& f) {
  fs::path dir = f.out.empty() ? fs::path("out") : fs::path(f.out);
  ExperimentConfig c = analysis_config(f, dir);
  auto records = parse_runs_csv(read_file(dir / "runs.csv"), c.undefined_metrics);
  write_file(dir / "summary.csv", summary_csv(records, c));
  std::cout << "wrote " << (dir / "summary.csv").string();
  if (!c.trend_factor.empty()) {
    write_file(dir / "summary_f1.svg", summary_svg(records, c));
    std::cout << " and " << (dir / "summary_f1.svg").string();
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process discovery evaluation workbench"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { flags.seed = s; },
                                            "Override the config seed");
  };
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option_function<std::size_t>("--workers", [&](std::size_t w) { flags.workers = w; },
                                          "Worker threads")
        ->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("generate", "Generate models and logs only");
  gen->add_option("--config", flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", flags.out, "Output directory");
  add_seed(gen);

  auto* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--config", flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", flags.out, "Output directory");
  run->add_flag("--resume", flags.resume, "Keep runs already completed in the output directory");
  add_seed(run);
  add_workers(run);

  auto* st = app.add_subcommand("stats", "Re-analyze an existing runs.csv");
  st->add_option("--out", flags.out, "Directory holding runs.csv (default: out)");
  st->add_option("--config", flags.config, "Config to use instead of the stored one")->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("report", "Write summary table and plot");
  rep->add_option("--out", flags.out, "Directory holding runs.csv (default: out)");
  rep->add_option("--config", flags.config, "Config to use instead of the stored one")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(flags);
    if (run->parsed()) return cmd_run(flags);
    if (st->parsed()) return cmd_stats(flags);
    if (rep->parsed()) return cmd_report(flags);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
