#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pdbench/analysis.hpp"
#include "pdbench/experiment.hpp"

namespace pdbench {

/// Exact header of runs.csv.
inline constexpr std::string_view kRunsHeader =
    "cell_id,miner,model_id,log_id,fold,tp,fp,fn,tn,precision,recall,f1,budget_exceeded,status";

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// One row per fold of each run; a failed run contributes a single row with
/// empty fold and metric fields.
std::string runs_csv(const std::vector<RunRecord>& records);
/// Rebuilds records (ids, fold matrices, status) from runs.csv and recomputes
/// the averages. Seeds, sizes and completeness are not part of the file.
std::vector<RunRecord> parse_runs_csv(std::string_view csv, UndefinedPolicy policy);

/// One row per run with the averaged metrics and run-level facts.
std::string aggregate_csv(const std::vector<RunRecord>& records);

std::string stats_json(const StatsReport& report);
std::string stats_text(const StatsReport& report);

/// Mean precision/recall/F1 per (panel, miner, trend level).
std::string summary_csv(const std::vector<RunRecord>& records, const ExperimentConfig& config);
/// Mean F1 against the trend factor, one polyline per miner, one panel per
/// combination of the remaining factors.
std::string summary_svg(const std::vector<RunRecord>& records, const ExperimentConfig& config);

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(std::string_view json, UndefinedPolicy policy);

/// File helpers; failures raise IoError carrying the path.
std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and a rename.
void write_file(const std::filesystem::path& path, std::string_view content);

/// runs.csv, aggregate.csv, stats.json, stats.txt, summary.csv and
/// summary_f1.svg under `dir`.
void write_reports(const std::filesystem::path& dir, const std::vector<RunRecord>& records,
                   const ExperimentConfig& config);

}  // namespace pdbench
