#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdbench/experiment.hpp"
#include "pdbench/stats.hpp"

namespace pdbench {

enum class MetricKind { precision, recall, f1 };
const char* to_string(MetricKind m);

/// Per-run value of a metric under the config's policies: failed runs become
/// 0 under FailurePolicy::zero and are skipped otherwise; undefined averages
/// are skipped.
std::optional<double> run_metric(const RunRecord& r, MetricKind m, FailurePolicy on_failure);

/// Kruskal-Wallis plus post-hoc comparison of the miners inside one block.
struct MinerComparison {
  std::string block;  // cell id, or "all" for the pooled comparison
  std::vector<std::string> miners;
  std::vector<std::size_t> n;
  std::vector<double> mean_ranks;
  std::optional<KruskalWallis> kw;
  std::optional<Posthoc> posthoc;
  std::string note;  // why a test was skipped
};

/// One miner's metric across the ordered levels of the trend factor, within
/// one panel (a combination of the remaining factors).
struct TrendSeries {
  std::string miner;
  std::string panel;
  std::vector<double> levels;
  std::vector<std::size_t> n;
  std::vector<double> means;
  std::optional<Jonckheere> test;
  std::string direction = "none";  // increasing | decreasing | none
  std::string note;
};

struct MetricAnalysis {
  MetricKind metric = MetricKind::f1;
  std::vector<MinerComparison> comparisons;
  std::vector<TrendSeries> trends;
};

struct StatsReport {
  double alpha = 0.05;
  std::string trend_factor;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
  std::vector<MetricAnalysis> metrics;
};

/// Panel label of a cell: its factors other than `trend_factor`, as
/// `name=value` pairs joined by ';' (empty when there are none).
std::string panel_of(const CellSpec& cell, const std::string& trend_factor);

StatsReport analyze(const std::vector<RunRecord>& records, const ExperimentConfig& config);

}  // namespace pdbench
