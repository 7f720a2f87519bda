#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdbench/event_log.hpp"
#include "pdbench/metrics.hpp"
#include "pdbench/miners.hpp"
#include "pdbench/noise.hpp"
#include "pdbench/petri_net.hpp"
#include "pdbench/population.hpp"
#include "pdbench/process_tree.hpp"
#include "pdbench/replay.hpp"
#include "pdbench/simulate.hpp"

namespace pdbench {

enum class FailurePolicy { exclude, zero };

/// One blocking cell: a named population plus the factor values it stands
/// for (used to order and group cells in the analysis).
struct CellSpec {
  std::string id;
  std::map<std::string, double> factors;
  PopulationSpec population;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t models_per_cell = 62;
  std::size_t log_size_min = 200;
  std::size_t log_size_max = 1000;
  std::size_t k_folds = 10;
  double noise_prob = 1.0 / 3.0;
  std::size_t noise_rounds = 5;
  ReplayOptions replay;
  FailurePolicy on_failure = FailurePolicy::exclude;
  UndefinedPolicy undefined_metrics = UndefinedPolicy::exclude;
  double alpha = 0.05;
  std::vector<MinerSpec> miners;
  std::vector<CellSpec> cells;
  /// Cell factor whose levels are ordered for the trend test; empty = none.
  std::string trend_factor;
  /// Cap of the bounded language used for the completeness column; 0 skips it.
  std::size_t completeness_max_traces = 10000;
  std::string output_dir = "out";
  std::size_t workers = 1;
  bool save_artifacts = false;
};

/// Parses the JSON config document. Every field except `seed`, `miners` and
/// `cells` has a default; a top-level `population` object supplies defaults
/// that each cell's `population` overrides. Throws ConfigInvalid.
ExperimentConfig parse_config(std::string_view json);
/// Canonical JSON form (round-trips through parse_config).
std::string config_to_json(const ExperimentConfig& config);
/// Fingerprint of everything that influences run results (excludes the output
/// directory and the worker count).
std::string config_fingerprint(const ExperimentConfig& config);
/// Throws ConfigInvalid on out-of-range values, duplicate ids or unknown
/// miners.
void validate_config(const ExperimentConfig& config,
                     const MinerRegistry& registry = MinerRegistry::builtin());

enum class RunStatus { ok, miner_failed, pool_exhausted };
const char* to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view s);

struct RunRecord {
  std::string cell_id;
  std::string miner;
  std::size_t model_id = 0;
  std::string log_id;
  std::vector<FoldResult> folds;
  AveragedMetrics averaged;
  RunStatus status = RunStatus::ok;
  std::string message;
  std::uint64_t model_seed = 0;
  std::uint64_t log_seed = 0;
  std::uint64_t fold_seed = 0;
  std::size_t log_size = 0;
  std::size_t model_size = 0;
  std::optional<Completeness> completeness;
};

/// Recomputes `averaged` from `folds` under the given policy (no-op for
/// failed runs; all-undefined folds leave the averages empty).
void refresh_averages(RunRecord& record, UndefinedPolicy policy);

/// Everything one fold of one run sees.
struct FoldArtifacts {
  std::size_t fold = 0;
  const ProcessTree* model = nullptr;
  const EventLog* training = nullptr;
  const std::vector<Trace>* fitting_tests = nullptr;
  const std::vector<NoisedTrace>* noised = nullptr;
  const PetriNet* discovered = nullptr;
  const FoldResult* result = nullptr;
};

/// Induces a net from the training log. The ground-truth tree is passed along
/// for oracle discoverers; real miners ignore it.
using Discoverer = std::function<PetriNet(const EventLog& training, const ProcessTree& truth)>;
using FoldObserver = std::function<void(const FoldArtifacts&)>;

Discoverer registry_discoverer(const MinerSpec& miner,
                               const MinerRegistry& registry = MinerRegistry::builtin());

/// Model and log of one run, drawn from the run's own streams.
struct RunData {
  ProcessTree model;
  EventLog log;
  std::uint64_t model_seed = 0;
  std::uint64_t log_seed = 0;
};
RunData generate_run_data(const ExperimentConfig& config, const CellSpec& cell,
                          const std::string& miner, std::size_t model_index);

/// 16 hex digits.
std::string format_log_id(std::uint64_t log_seed);

/// The full per-run pipeline: generate, simulate, split, discover, noise,
/// classify, average. Miner failures and pool exhaustion end up in the
/// record's status; other errors propagate.
RunRecord execute_run(const ExperimentConfig& config, const CellSpec& cell,
                      const std::string& miner, std::size_t model_index,
                      const Discoverer& discoverer, const FoldObserver& observer = {});

struct ExecutionOptions {
  bool resume = false;
  bool write_files = true;
  /// Called after each completed run with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs every (cell, miner, model) combination with `config.workers` threads
/// and returns the records sorted by cell id, miner name and model index
/// regardless of scheduling. When writing files, every finished
/// run is persisted immediately so an interrupted experiment can resume.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const ExecutionOptions& options = {});

/// Throws Error if two records share a log id or a model seed.
void check_independence(const std::vector<RunRecord>& records);

}  // namespace pdbench
