#include "pdbench/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pdbench/errors.hpp"

namespace pdbench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt(const Metric& m) { return m ? format_double(*m) : std::string(); }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t p = line.find(sep, start);
    out.emplace_back(line.substr(start, p == std::string_view::npos ? line.npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("runs.csv line " + std::to_string(line) + ": bad count '" + s + "'");
  return v;
}

std::string level_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct SummaryRow {
  std::string panel;
  std::string miner;
  std::string level;
  double level_value = 0.0;
  std::size_t runs = 0;
  std::vector<double> values[3];
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const ExperimentConfig& config) {
  std::map<std::string, const CellSpec*> cells;
  for (const auto& c : config.cells) cells[c.id] = &c;
  std::vector<std::string> miners;
  for (const auto& m : config.miners) miners.push_back(m.name);
  auto miner_rank = [&](const std::string& m) {
    return static_cast<std::size_t>(std::find(miners.begin(), miners.end(), m) - miners.begin());
  };

  std::vector<SummaryRow> rows;
  for (const auto& r : records) {
    SummaryRow key;
    key.miner = r.miner;
    auto it = cells.find(r.cell_id);
    if (!config.trend_factor.empty() && it != cells.end() &&
        it->second->factors.count(config.trend_factor)) {
      key.panel = panel_of(*it->second, config.trend_factor);
      key.level_value = it->second->factors.at(config.trend_factor);
      key.level = level_text(key.level_value);
    } else {
      key.level = r.cell_id;
    }
    auto row = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.panel == key.panel && s.miner == key.miner && s.level == key.level;
    });
    if (row == rows.end()) row = rows.insert(rows.end(), key);
    ++row->runs;
    const MetricKind kinds[3] = {MetricKind::precision, MetricKind::recall, MetricKind::f1};
    for (int m = 0; m < 3; ++m)
      if (auto v = run_metric(r, kinds[m], config.on_failure)) row->values[m].push_back(*v);
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    if (a.panel != b.panel) return a.panel < b.panel;
    if (a.miner != b.miner) return miner_rank(a.miner) < miner_rank(b.miner);
    if (a.level_value != b.level_value) return a.level_value < b.level_value;
    return a.level < b.level;
  });
  return rows;
}

ojson comparison_json(const MinerComparison& c) {
  ojson j;
  j["block"] = c.block;
  j["miners"] = c.miners;
  j["n"] = c.n;
  j["mean_ranks"] = c.mean_ranks;
  if (c.kw) {
    j["kruskal_wallis"] = {{"statistic", c.kw->statistic}, {"df", c.kw->df}, {"p_value", c.kw->p_value}};
  } else {
    j["kruskal_wallis"] = nullptr;
  }
  if (c.posthoc) {
    ojson p;
    p["alpha"] = c.posthoc->alpha;
    p["z"] = c.posthoc->z;
    p["critical_value"] = c.posthoc->critical_value;
    p["unequal_groups"] = c.posthoc->unequal_groups;
    p["critical"] = c.posthoc->critical;
    p["difference"] = c.posthoc->difference;
    ojson sig = ojson::array();
    for (const auto& row : c.posthoc->significant) {
      ojson r = ojson::array();
      for (bool b : row) r.push_back(b);
      sig.push_back(r);
    }
    p["significant"] = sig;
    j["posthoc"] = p;
  } else {
    j["posthoc"] = nullptr;
  }
  j["note"] = c.note;
  return j;
}

}  // namespace

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::string out(kRunsHeader);
  out += '\n';
  for (const auto& r : records) {
    std::string prefix =
        r.cell_id + ',' + r.miner + ',' + std::to_string(r.model_id) + ',' + r.log_id + ',';
    if (r.status != RunStatus::ok || r.folds.empty()) {
      out += prefix + ",,,,,,,,," + to_string(r.status) + '\n';
      continue;
    }
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      const auto& fr = r.folds[f];
      out += prefix + std::to_string(f) + ',' + std::to_string(fr.matrix.tp) + ',' +
             std::to_string(fr.matrix.fp) + ',' + std::to_string(fr.matrix.fn) + ',' +
             std::to_string(fr.matrix.tn) + ',' + opt(fr.precision) + ',' + opt(fr.recall) + ',' +
             opt(fr.f1) + ',' + std::to_string(fr.replay_budget_exceeded) + ',' +
             to_string(r.status) + '\n';
    }
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(std::string_view csv, UndefinedPolicy policy) {
  std::vector<RunRecord> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line != kRunsHeader)
    throw ParseError("runs.csv: unexpected header");
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 14)
      throw ParseError("runs.csv line " + std::to_string(lineno) + ": expected 14 fields");
    std::size_t model_id = parse_count(f[2], lineno);
    bool same = !out.empty() && out.back().cell_id == f[0] && out.back().miner == f[1] &&
                out.back().model_id == model_id && out.back().log_id == f[3];
    if (!same) {
      RunRecord r;
      r.cell_id = f[0];
      r.miner = f[1];
      r.model_id = model_id;
      r.log_id = f[3];
      try {
        r.status = run_status_from_string(f[13]);
      } catch (const Error& e) {
        throw ParseError("runs.csv line " + std::to_string(lineno) + ": " + e.what());
      }
      out.push_back(std::move(r));
    }
    if (f[4].empty()) continue;
    ConfusionMatrix m{parse_count(f[5], lineno), parse_count(f[6], lineno),
                      parse_count(f[7], lineno), parse_count(f[8], lineno)};
    out.back().folds.push_back(make_fold_result(m, parse_count(f[12], lineno)));
  }
  for (auto& r : out) refresh_averages(r, policy);
  return out;
}

std::string aggregate_csv(const std::vector<RunRecord>& records) {
  std::string out =
      "cell_id,miner,model_id,log_id,status,avg_precision,avg_recall,avg_f1,undefined_folds,"
      "log_size,model_size,completeness,completeness_lower_bound\n";
  for (const auto& r : records) {
    out += r.cell_id + ',' + r.miner + ',' + std::to_string(r.model_id) + ',' + r.log_id + ',' +
           to_string(r.status) + ',' + opt(r.averaged.precision) + ',' + opt(r.averaged.recall) +
           ',' + opt(r.averaged.f1) + ',' + std::to_string(r.averaged.undefined_folds) + ',' +
           std::to_string(r.log_size) + ',' + std::to_string(r.model_size) + ',';
    if (r.completeness) {
      out += format_double(r.completeness->ratio) + ',' +
             (r.completeness->lower_bound ? "1" : "0");
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

std::string stats_json(const StatsReport& report) {
  ojson j;
  j["alpha"] = report.alpha;
  j["trend_factor"] = report.trend_factor;
  j["runs"] = report.runs;
  j["failed_runs"] = report.failed_runs;
  ojson metrics = ojson::object();
  for (const auto& m : report.metrics) {
    ojson mj;
    ojson comps = ojson::array();
    for (const auto& c : m.comparisons) comps.push_back(comparison_json(c));
    mj["comparisons"] = comps;
    ojson trends = ojson::array();
    for (const auto& t : m.trends) {
      ojson tj;
      tj["miner"] = t.miner;
      tj["panel"] = t.panel;
      tj["levels"] = t.levels;
      tj["n"] = t.n;
      tj["means"] = t.means;
      if (t.test) {
        tj["J"] = t.test->J;
        tj["mean"] = t.test->mean;
        tj["variance"] = t.test->variance;
        tj["z"] = t.test->z;
        tj["p_increasing"] = t.test->p_increasing;
        tj["p_decreasing"] = t.test->p_decreasing;
        tj["p_two_sided"] = t.test->p_two_sided;
      }
      tj["direction"] = t.direction;
      tj["note"] = t.note;
      trends.push_back(tj);
    }
    mj["trends"] = trends;
    metrics[to_string(m.metric)] = mj;
  }
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

std::string stats_text(const StatsReport& report) {
  std::ostringstream os;
  char buf[256];
  os << "runs: " << report.runs << " (failed: " << report.failed_runs << ")\n";
  os << "alpha: " << report.alpha << "\n";
  for (const auto& m : report.metrics) {
    os << "\n== " << to_string(m.metric) << " ==\n";
    for (const auto& c : m.comparisons) {
      os << "\n[" << c.block << "]";
      if (c.kw) {
        std::snprintf(buf, sizeof buf, "  KW = %.4f  df = %zu  p = %.4g", c.kw->statistic, c.kw->df,
                      c.kw->p_value);
        os << buf;
      }
      if (!c.note.empty()) os << "  (" << c.note << ")";
      os << "\n";
      for (std::size_t i = 0; i < c.miners.size(); ++i) {
        std::snprintf(buf, sizeof buf, "  %-18s n = %-5zu mean rank = %.3f\n", c.miners[i].c_str(),
                      c.n[i], i < c.mean_ranks.size() ? c.mean_ranks[i] : 0.0);
        os << buf;
      }
      if (c.posthoc) {
        for (std::size_t i = 0; i < c.miners.size(); ++i)
          for (std::size_t k = i + 1; k < c.miners.size(); ++k) {
            std::snprintf(buf, sizeof buf, "  %s vs %s: |diff| = %.3f, critical = %.3f%s\n",
                          c.miners[i].c_str(), c.miners[k].c_str(), c.posthoc->difference[i][k],
                          c.posthoc->critical[i][k], c.posthoc->significant[i][k] ? "  *" : "");
            os << buf;
          }
      }
    }
    if (!m.trends.empty()) os << "\ntrend over " << report.trend_factor << ":\n";
    for (const auto& t : m.trends) {
      os << "  " << t.miner;
      if (!t.panel.empty()) os << " [" << t.panel << "]";
      os << ": means";
      for (std::size_t i = 0; i < t.levels.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %g:%.3f", t.levels[i], t.means[i]);
        os << buf;
      }
      if (t.test) {
        std::snprintf(buf, sizeof buf, "  J = %.1f  z = %.3f  p(inc) = %.4g  p(dec) = %.4g", t.test->J,
                      t.test->z, t.test->p_increasing, t.test->p_decreasing);
        os << buf;
      }
      os << "  -> " << t.direction;
      if (!t.note.empty()) os << " (" << t.note << ")";
      os << "\n";
    }
  }
  return os.str();
}

std::string summary_csv(const std::vector<RunRecord>& records, const ExperimentConfig& config) {
  std::string level = config.trend_factor.empty() ? "cell" : config.trend_factor;
  std::string out = "panel,miner," + level + ",runs,n_f1,mean_precision,mean_recall,mean_f1\n";
  for (const auto& row : summarize(records, config)) {
    out += row.panel + ',' + row.miner + ',' + row.level + ',' + std::to_string(row.runs) + ',' +
           std::to_string(row.values[2].size()) + ',' + format_double(mean(row.values[0])) + ',' +
           format_double(mean(row.values[1])) + ',' + format_double(mean(row.values[2])) + '\n';
  }
  return out;
}

std::string summary_svg(const std::vector<RunRecord>& records, const ExperimentConfig& config) {
  auto rows = summarize(records, config);
  std::vector<std::string> panels;
  std::vector<std::string> miners;
  double xmin = 0.0, xmax = 1.0;
  bool first = true;
  for (const auto& r : rows) {
    if (std::find(panels.begin(), panels.end(), r.panel) == panels.end()) panels.push_back(r.panel);
    if (std::find(miners.begin(), miners.end(), r.miner) == miners.end()) miners.push_back(r.miner);
    if (first) {
      xmin = xmax = r.level_value;
      first = false;
    }
    xmin = std::min(xmin, r.level_value);
    xmax = std::max(xmax, r.level_value);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (panels.empty()) panels.push_back("");

  const int pw = 360, ph = 260, ml = 50, mt = 30, gap = 30, legend = 130;
  const int width = static_cast<int>(panels.size()) * (pw + gap) + ml + legend;
  const int height = ph + mt + 60;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream os;
  char buf[512];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    int x0 = ml + static_cast<int>(p) * (pw + gap);
    auto sx = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return mt + (1.0 - v) * ph; };
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" stroke=\"#444\"/>\n",
                  x0, mt, pw, ph);
    os << buf;
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << mt - 10 << "\" text-anchor=\"middle\">"
       << (panels[p].empty() ? std::string("mean F1") : panels[p]) << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
      double v = t / 4.0;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                    "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n",
                    x0, sy(v), x0 + pw, sy(v), x0 - 4, sy(v) + 4, v);
      os << buf;
    }
    std::set<double> levels;
    for (const auto& r : rows)
      if (r.panel == panels[p]) levels.insert(r.level_value);
    for (double l : levels) {
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%g</text>\n",
                    sx(l), mt + ph + 15, l);
      os << buf;
    }
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << mt + ph + 35 << "\" text-anchor=\"middle\">"
       << (config.trend_factor.empty() ? "cell" : config.trend_factor) << "</text>\n";
    for (std::size_t m = 0; m < miners.size(); ++m) {
      std::string points;
      for (const auto& r : rows) {
        if (r.panel != panels[p] || r.miner != miners[m]) continue;
        std::snprintf(buf, sizeof buf, "%.1f,%.1f ", sx(r.level_value), sy(mean(r.values[2])));
        points += buf;
      }
      const char* colour = palette[m % 7];
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\""
         << points << "\"/>\n";
    }
  }
  int lx = ml + static_cast<int>(panels.size()) * (pw + gap);
  for (std::size_t m = 0; m < miners.size(); ++m) {
    int ly = mt + 15 + static_cast<int>(m) * 18;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"%s\" stroke-width=\"3\"/>"
                  "<text x=\"%d\" y=\"%d\">%s</text>\n",
                  lx, ly, lx + 20, ly, palette[m % 7], lx + 26, ly + 4, miners[m].c_str());
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

std::string run_record_to_json(const RunRecord& r) {
  ojson j;
  j["cell_id"] = r.cell_id;
  j["miner"] = r.miner;
  j["model_id"] = r.model_id;
  j["log_id"] = r.log_id;
  j["status"] = to_string(r.status);
  j["message"] = r.message;
  j["model_seed"] = r.model_seed;
  j["log_seed"] = r.log_seed;
  j["fold_seed"] = r.fold_seed;
  j["log_size"] = r.log_size;
  j["model_size"] = r.model_size;
  if (r.completeness) {
    j["completeness"] = {{"ratio", r.completeness->ratio},
                         {"lower_bound", r.completeness->lower_bound},
                         {"language_size", r.completeness->language_size},
                         {"observed", r.completeness->observed}};
  } else {
    j["completeness"] = nullptr;
  }
  ojson folds = ojson::array();
  for (const auto& f : r.folds)
    folds.push_back({{"tp", f.matrix.tp},
                     {"fp", f.matrix.fp},
                     {"fn", f.matrix.fn},
                     {"tn", f.matrix.tn},
                     {"budget_exceeded", f.replay_budget_exceeded}});
  j["folds"] = folds;
  j["avg_precision"] = opt_json(r.averaged.precision);
  j["avg_recall"] = opt_json(r.averaged.recall);
  j["avg_f1"] = opt_json(r.averaged.f1);
  return j.dump() + "\n";
}

RunRecord run_record_from_json(std::string_view text, UndefinedPolicy policy) {
  try {
    auto j = ojson::parse(text);
    RunRecord r;
    r.cell_id = j.at("cell_id").get<std::string>();
    r.miner = j.at("miner").get<std::string>();
    r.model_id = j.at("model_id").get<std::size_t>();
    r.log_id = j.at("log_id").get<std::string>();
    r.status = run_status_from_string(j.at("status").get<std::string>());
    r.message = j.at("message").get<std::string>();
    r.model_seed = j.at("model_seed").get<std::uint64_t>();
    r.log_seed = j.at("log_seed").get<std::uint64_t>();
    r.fold_seed = j.at("fold_seed").get<std::uint64_t>();
    r.log_size = j.at("log_size").get<std::size_t>();
    r.model_size = j.at("model_size").get<std::size_t>();
    const auto& c = j.at("completeness");
    if (!c.is_null()) {
      Completeness comp;
      comp.ratio = c.at("ratio").get<double>();
      comp.lower_bound = c.at("lower_bound").get<bool>();
      comp.language_size = c.at("language_size").get<std::size_t>();
      comp.observed = c.at("observed").get<std::size_t>();
      r.completeness = comp;
    }
    for (const auto& f : j.at("folds")) {
      ConfusionMatrix m{f.at("tp").get<std::size_t>(), f.at("fp").get<std::size_t>(),
                        f.at("fn").get<std::size_t>(), f.at("tn").get<std::size_t>()};
      r.folds.push_back(make_fold_result(m, f.at("budget_exceeded").get<std::size_t>()));
    }
    refresh_averages(r, policy);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(path.string(), ec.message());
}

void write_reports(const fs::path& dir, const std::vector<RunRecord>& records,
                   const ExperimentConfig& config) {
  write_file(dir / "runs.csv", runs_csv(records));
  write_file(dir / "aggregate.csv", aggregate_csv(records));
  StatsReport report = analyze(records, config);
  write_file(dir / "stats.json", stats_json(report));
  write_file(dir / "stats.txt", stats_text(report));
  write_file(dir / "summary.csv", summary_csv(records, config));
  if (!config.trend_factor.empty()) write_file(dir / "summary_f1.svg", summary_svg(records, config));
}

}  // namespace pdbench
