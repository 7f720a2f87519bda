#include "pdbench/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "pdbench/errors.hpp"

namespace pdbench {

const char* to_string(MetricKind m) {
  switch (m) {
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::f1: return "f1";
  }
  return "?";
}

std::optional<double> run_metric(const RunRecord& r, MetricKind m, FailurePolicy on_failure) {
  if (r.status != RunStatus::ok)
    return on_failure == FailurePolicy::zero ? std::optional<double>(0.0) : std::nullopt;
  switch (m) {
    case MetricKind::precision: return r.averaged.precision;
    case MetricKind::recall: return r.averaged.recall;
    case MetricKind::f1: return r.averaged.f1;
  }
  return std::nullopt;
}

std::string panel_of(const CellSpec& cell, const std::string& trend_factor) {
  std::string out;
  for (const auto& [name, value] : cell.factors) {
    if (name == trend_factor) continue;
    if (!out.empty()) out += ';';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", value);
    out += name + "=" + buf;
  }
  return out;
}

namespace {

MinerComparison compare(const std::string& block, const std::vector<std::string>& miners,
                        const std::vector<std::vector<double>>& samples, double alpha) {
  MinerComparison c;
  c.block = block;
  std::vector<std::vector<double>> kept;
  for (std::size_t i = 0; i < miners.size(); ++i) {
    if (samples[i].empty()) continue;
    c.miners.push_back(miners[i]);
    c.n.push_back(samples[i].size());
    kept.push_back(samples[i]);
  }
  if (kept.size() < 2) {
    c.note = "fewer than two miners with values";
    return c;
  }
  RankedSamples r;
  try {
    r = rank_all(kept);
  } catch (const std::invalid_argument& e) {
    c.note = e.what();
    return c;
  }
  c.mean_ranks = r.group_mean_ranks;
  try {
    c.kw = kruskal_wallis(r);
  } catch (const DegenerateData&) {
    c.note = "all values identical";
    return c;
  }
  c.posthoc = posthoc_pairwise(r, alpha);
  if (c.posthoc->unequal_groups) c.note = "unequal group sizes";
  return c;
}

}  // namespace

StatsReport analyze(const std::vector<RunRecord>& records, const ExperimentConfig& config) {
  StatsReport report;
  report.alpha = config.alpha;
  report.trend_factor = config.trend_factor;
  report.runs = records.size();
  for (const auto& r : records)
    if (r.status != RunStatus::ok) ++report.failed_runs;

  std::vector<std::string> miners;
  for (const auto& m : config.miners) miners.push_back(m.name);
  for (const auto& r : records)
    if (std::find(miners.begin(), miners.end(), r.miner) == miners.end()) miners.push_back(r.miner);
  auto miner_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(miners.begin(), miners.end(), name) - miners.begin());
  };
  std::map<std::string, const CellSpec*> cells;
  for (const auto& c : config.cells) cells[c.id] = &c;

  for (MetricKind m : {MetricKind::precision, MetricKind::recall, MetricKind::f1}) {
    MetricAnalysis a;
    a.metric = m;

    std::vector<std::string> cell_ids;
    for (const auto& c : config.cells) cell_ids.push_back(c.id);
    for (const auto& r : records)
      if (!cells.count(r.cell_id) &&
          std::find(cell_ids.begin(), cell_ids.end(), r.cell_id) == cell_ids.end())
        cell_ids.push_back(r.cell_id);

    std::vector<std::vector<double>> pooled(miners.size());
    for (const auto& cell : cell_ids) {
      std::vector<std::vector<double>> samples(miners.size());
      for (const auto& r : records) {
        if (r.cell_id != cell) continue;
        if (auto v = run_metric(r, m, config.on_failure)) {
          samples[miner_index(r.miner)].push_back(*v);
          pooled[miner_index(r.miner)].push_back(*v);
        }
      }
      a.comparisons.push_back(compare(cell, miners, samples, config.alpha));
    }
    if (cell_ids.size() > 1) a.comparisons.push_back(compare("all", miners, pooled, config.alpha));

    if (!config.trend_factor.empty()) {
      // (panel, miner) -> level -> values
      std::map<std::pair<std::string, std::size_t>, std::map<double, std::vector<double>>> series;
      for (const auto& r : records) {
        auto it = cells.find(r.cell_id);
        if (it == cells.end()) continue;
        auto f = it->second->factors.find(config.trend_factor);
        if (f == it->second->factors.end()) continue;
        auto& bucket = series[{panel_of(*it->second, config.trend_factor), miner_index(r.miner)}];
        auto& values = bucket[f->second];
        if (auto v = run_metric(r, m, config.on_failure)) values.push_back(*v);
      }
      for (auto& [key, levels] : series) {
        TrendSeries t;
        t.panel = key.first;
        t.miner = miners[key.second];
        std::vector<std::vector<double>> samples;
        for (auto& [level, values] : levels) {
          t.levels.push_back(level);
          t.n.push_back(values.size());
          double sum = 0.0;
          for (double v : values) sum += v;
          t.means.push_back(values.empty() ? 0.0 : sum / static_cast<double>(values.size()));
          samples.push_back(values);
        }
        bool usable = samples.size() >= 2 &&
                      std::none_of(samples.begin(), samples.end(),
                                   [](const auto& s) { return s.empty(); });
        if (!usable) {
          t.note = "needs at least two nonempty levels";
        } else {
          t.test = jonckheere(samples);
          if (t.test->p_decreasing < config.alpha) t.direction = "decreasing";
          else if (t.test->p_increasing < config.alpha) t.direction = "increasing";
        }
        a.trends.push_back(std::move(t));
      }
      std::stable_sort(a.trends.begin(), a.trends.end(), [&](const TrendSeries& x, const TrendSeries& y) {
        if (x.panel != y.panel) return x.panel < y.panel;
        return miner_index(x.miner) < miner_index(y.miner);
      });
    }
    report.metrics.push_back(std::move(a));
  }
  return report;
}

}  // namespace pdbench
