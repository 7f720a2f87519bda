#include "pdbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "pdbench/compile.hpp"
#include "pdbench/errors.hpp"
#include "pdbench/folds.hpp"
#include "pdbench/reports.hpp"

namespace pdbench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::miner_failed: return "miner-failed";
    case RunStatus::pool_exhausted: return "pool-exhausted";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view s) {
  if (s == "ok") return RunStatus::ok;
  if (s == "miner-failed") return RunStatus::miner_failed;
  if (s == "pool-exhausted") return RunStatus::pool_exhausted;
  throw Error("unknown run status '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ConfigInvalid(what); }

template <typename T>
T get_as(const ojson& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const ojson& j, const char* key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    invalid(std::string("field '") + key + "' must be a nonnegative integer");
  return j.get<std::size_t>();
}

double get_number(const ojson& j, const char* key) {
  if (!j.is_number()) invalid(std::string("field '") + key + "' must be a number");
  return j.get<double>();
}

void check_keys(const ojson& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid("unknown field '" + key + "' in " + where);
  }
}

constexpr std::initializer_list<const char*> kPopulationKeys = {
    "size_min", "size_mode", "size_max", "p_seq",    "p_xor",           "p_and",         "p_or",
    "p_loop",   "p_silent",  "p_duplicate", "p_ltdep", "infrequent_paths", "loop_exit_prob"};

bool is_population_key(const std::string& key) {
  for (const char* k : kPopulationKeys)
    if (key == k) return true;
  return false;
}

void apply_population(const ojson& j, PopulationSpec& p, const std::string& where) {
  check_keys(j, kPopulationKeys, where);
  if (j.contains("size_min")) p.size_min = get_count(j["size_min"], "size_min");
  if (j.contains("size_mode")) p.size_mode = get_count(j["size_mode"], "size_mode");
  if (j.contains("size_max")) p.size_max = get_count(j["size_max"], "size_max");
  if (j.contains("p_seq")) p.p_seq = get_number(j["p_seq"], "p_seq");
  if (j.contains("p_xor")) p.p_xor = get_number(j["p_xor"], "p_xor");
  if (j.contains("p_and")) p.p_and = get_number(j["p_and"], "p_and");
  if (j.contains("p_or")) p.p_or = get_number(j["p_or"], "p_or");
  if (j.contains("p_loop")) p.p_loop = get_number(j["p_loop"], "p_loop");
  if (j.contains("p_silent")) p.p_silent = get_number(j["p_silent"], "p_silent");
  if (j.contains("p_duplicate")) p.p_duplicate = get_number(j["p_duplicate"], "p_duplicate");
  if (j.contains("p_ltdep")) p.p_ltdep = get_number(j["p_ltdep"], "p_ltdep");
  if (j.contains("infrequent_paths"))
    p.infrequent_paths = get_as<bool>(j["infrequent_paths"], "infrequent_paths");
  if (j.contains("loop_exit_prob")) p.loop_exit_prob = get_number(j["loop_exit_prob"], "loop_exit_prob");
}

ojson population_json(const PopulationSpec& p) {
  return {{"size_min", p.size_min},         {"size_mode", p.size_mode},
          {"size_max", p.size_max},         {"p_seq", p.p_seq},
          {"p_xor", p.p_xor},               {"p_and", p.p_and},
          {"p_or", p.p_or},                 {"p_loop", p.p_loop},
          {"p_silent", p.p_silent},         {"p_duplicate", p.p_duplicate},
          {"p_ltdep", p.p_ltdep},           {"infrequent_paths", p.infrequent_paths},
          {"loop_exit_prob", p.loop_exit_prob}};
}

ojson config_json(const ExperimentConfig& c, bool with_runtime) {
  ojson j;
  j["seed"] = c.seed;
  j["models_per_cell"] = c.models_per_cell;
  j["log_size_min"] = c.log_size_min;
  j["log_size_max"] = c.log_size_max;
  j["k_folds"] = c.k_folds;
  j["noise_prob"] = c.noise_prob;
  j["noise_rounds"] = c.noise_rounds;
  j["replay"] = {{"token_bound", c.replay.token_bound}, {"state_budget", c.replay.state_budget}};
  j["on_failure"] = c.on_failure == FailurePolicy::zero ? "zero" : "exclude";
  j["undefined_metrics"] = c.undefined_metrics == UndefinedPolicy::zero ? "zero" : "exclude";
  j["alpha"] = c.alpha;
  ojson miners = ojson::array();
  for (const auto& m : c.miners) {
    ojson mj;
    mj["name"] = m.name;
    mj["parameters"] = m.parameters;
    miners.push_back(mj);
  }
  j["miners"] = miners;
  ojson cells = ojson::array();
  for (const auto& cell : c.cells) {
    ojson cj;
    cj["id"] = cell.id;
    cj["factors"] = cell.factors;
    cj["population"] = population_json(cell.population);
    cells.push_back(cj);
  }
  j["cells"] = cells;
  j["trend_factor"] = c.trend_factor;
  j["completeness_max_traces"] = c.completeness_max_traces;
  if (with_runtime) {
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;
    j["save_artifacts"] = c.save_artifacts;
  }
  return j;
}

bool safe_id(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  });
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"seed", "models_per_cell", "log_size_min", "log_size_max", "k_folds", "noise_prob",
                 "noise_rounds", "replay", "on_failure", "undefined_metrics", "alpha", "miners",
                 "population", "cells", "trend_factor", "completeness_max_traces", "output_dir",
                 "workers", "save_artifacts"},
             "config");
  ExperimentConfig c;
  if (!j.contains("seed")) invalid("config needs a 'seed'");
  if (!j["seed"].is_number_unsigned()) invalid("'seed' must be a nonnegative integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("models_per_cell")) c.models_per_cell = get_count(j["models_per_cell"], "models_per_cell");
  if (j.contains("log_size_min")) c.log_size_min = get_count(j["log_size_min"], "log_size_min");
  if (j.contains("log_size_max")) c.log_size_max = get_count(j["log_size_max"], "log_size_max");
  if (j.contains("k_folds")) c.k_folds = get_count(j["k_folds"], "k_folds");
  if (j.contains("noise_prob")) c.noise_prob = get_number(j["noise_prob"], "noise_prob");
  if (j.contains("noise_rounds")) c.noise_rounds = get_count(j["noise_rounds"], "noise_rounds");
  if (j.contains("replay")) {
    const auto& r = j["replay"];
    check_keys(r, {"token_bound", "state_budget"}, "replay");
    if (r.contains("token_bound"))
      c.replay.token_bound = static_cast<std::uint32_t>(get_count(r["token_bound"], "token_bound"));
    if (r.contains("state_budget")) c.replay.state_budget = get_count(r["state_budget"], "state_budget");
  }
  auto policy = [&](const char* key) {
    std::string v = get_as<std::string>(j[key], key);
    if (v != "exclude" && v != "zero") invalid(std::string("'") + key + "' must be exclude or zero");
    return v == "zero";
  };
  if (j.contains("on_failure"))
    c.on_failure = policy("on_failure") ? FailurePolicy::zero : FailurePolicy::exclude;
  if (j.contains("undefined_metrics"))
    c.undefined_metrics = policy("undefined_metrics") ? UndefinedPolicy::zero : UndefinedPolicy::exclude;
  if (j.contains("alpha")) c.alpha = get_number(j["alpha"], "alpha");

  if (!j.contains("miners") || !j["miners"].is_array()) invalid("config needs a 'miners' array");
  for (const auto& m : j["miners"]) {
    MinerSpec spec;
    if (m.is_string()) {
      spec.name = m.get<std::string>();
    } else {
      check_keys(m, {"name", "parameters"}, "miner");
      if (!m.contains("name")) invalid("miner entry without a name");
      spec.name = get_as<std::string>(m["name"], "name");
      if (m.contains("parameters")) {
        if (!m["parameters"].is_object()) invalid("miner parameters must be an object");
        for (const auto& [key, value] : m["parameters"].items())
          spec.parameters[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    c.miners.push_back(std::move(spec));
  }

  PopulationSpec base;
  if (j.contains("population")) apply_population(j["population"], base, "population");
  if (!j.contains("cells") || !j["cells"].is_array()) invalid("config needs a 'cells' array");
  for (const auto& cj : j["cells"]) {
    check_keys(cj, {"id", "factors", "population"}, "cell");
    CellSpec cell;
    if (!cj.contains("id")) invalid("cell without an id");
    cell.id = get_as<std::string>(cj["id"], "id");
    cell.population = base;
    if (cj.contains("factors")) {
      if (!cj["factors"].is_object()) invalid("cell factors must be an object");
      for (const auto& [name, value] : cj["factors"].items())
        cell.factors[name] = get_number(value, "factors");
    }
    // Factors named after population parameters set them; an explicit cell
    // population entry must agree.
    ojson from_factors = ojson::object();
    for (const auto& [name, value] : cell.factors) {
      if (!is_population_key(name)) continue;
      if (name == "infrequent_paths") from_factors[name] = value != 0.0;
      else if (name.rfind("size_", 0) == 0 && value >= 0.0 && value == std::floor(value))
        from_factors[name] = static_cast<std::uint64_t>(value);
      else from_factors[name] = value;
      if (cj.contains("population") && cj["population"].contains(name) &&
          cj["population"][name] != from_factors[name])
        invalid("cell " + cell.id + ": factor '" + name + "' disagrees with its population");
    }
    apply_population(from_factors, cell.population, "cell " + cell.id);
    if (cj.contains("population")) apply_population(cj["population"], cell.population, "cell " + cell.id);
    c.cells.push_back(std::move(cell));
  }
  if (j.contains("trend_factor")) c.trend_factor = get_as<std::string>(j["trend_factor"], "trend_factor");
  if (j.contains("completeness_max_traces"))
    c.completeness_max_traces = get_count(j["completeness_max_traces"], "completeness_max_traces");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  if (j.contains("workers")) c.workers = get_count(j["workers"], "workers");
  if (j.contains("save_artifacts")) c.save_artifacts = get_as<bool>(j["save_artifacts"], "save_artifacts");
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config, true).dump(2) + "\n";
}

std::string config_fingerprint(const ExperimentConfig& config) {
  std::string text = config_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return format_log_id(h);
}

void validate_config(const ExperimentConfig& c, const MinerRegistry& registry) {
  if (c.models_per_cell < 1) invalid("models_per_cell must be at least 1");
  if (c.k_folds < 2) invalid("k_folds must be at least 2");
  if (c.log_size_min > c.log_size_max) invalid("log_size_min exceeds log_size_max");
  if (c.log_size_min < 2 * c.k_folds)
    invalid("log_size_min must be at least twice k_folds so every test fold has both halves");
  if (!(c.noise_prob > 0.0 && c.noise_prob <= 1.0)) invalid("noise_prob must be in (0, 1]");
  if (c.noise_rounds < 1) invalid("noise_rounds must be at least 1");
  if (c.replay.state_budget < 1) invalid("replay state_budget must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) invalid("alpha must be in (0, 1)");
  if (c.miners.empty()) invalid("at least one miner is required");
  if (c.cells.empty()) invalid("at least one cell is required");
  if (c.workers < 1) invalid("workers must be at least 1");
  std::set<std::string> seen;
  for (const auto& m : c.miners) {
    registry.check(m);
    if (!registry.implemented(m.name)) invalid("miner '" + m.name + "' is reserved but not implemented");
    if (!seen.insert(m.name).second) invalid("miner '" + m.name + "' listed twice");
  }
  seen.clear();
  for (const auto& cell : c.cells) {
    if (!safe_id(cell.id)) invalid("cell id '" + cell.id + "' must use letters, digits, '_', '-', '.'");
    if (!seen.insert(cell.id).second) invalid("cell id '" + cell.id + "' used twice");
    try {
      cell.population.validate();
    } catch (const InfeasibleSpec& e) {
      invalid("cell " + cell.id + ": " + e.what());
    }
  }
}

// ---------------------------------------------------------------- runs

void refresh_averages(RunRecord& r, UndefinedPolicy policy) {
  r.averaged = AveragedMetrics{};
  if (r.status != RunStatus::ok || r.folds.empty()) return;
  try {
    r.averaged = average_folds(r.folds, policy);
  } catch (const AllUndefined&) {
    r.averaged.undefined_folds = r.folds.size();
  }
}

std::string format_log_id(std::uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

Discoverer registry_discoverer(const MinerSpec& miner, const MinerRegistry& registry) {
  return [&registry, miner](const EventLog& training, const ProcessTree&) {
    return registry.discover(miner, training);
  };
}

RunData generate_run_data(const ExperimentConfig& config, const CellSpec& cell,
                          const std::string& miner, std::size_t model_index) {
  std::uint64_t model_seed = derive_seed(config.seed, {cell.id, miner, model_index, "model"});
  Rng model_rng(model_seed);
  ProcessTree model = generate_tree(cell.population, model_rng);

  std::uint64_t log_seed = derive_seed(config.seed, {cell.id, miner, model_index, "log"});
  Rng log_rng(log_seed);
  std::size_t n = config.log_size_min +
                  static_cast<std::size_t>(uniform_index(log_rng, config.log_size_max - config.log_size_min + 1));
  EventLog log = simulate_log(model, n, log_rng);
  return RunData{std::move(model), std::move(log), model_seed, log_seed};
}

RunRecord execute_run(const ExperimentConfig& config, const CellSpec& cell, const std::string& miner,
                      std::size_t model_index, const Discoverer& discoverer,
                      const FoldObserver& observer) {
  RunData data = generate_run_data(config, cell, miner, model_index);
  RunRecord rec;
  rec.cell_id = cell.id;
  rec.miner = miner;
  rec.model_id = model_index;
  rec.log_id = format_log_id(data.log_seed);
  rec.model_seed = data.model_seed;
  rec.log_seed = data.log_seed;
  rec.log_size = data.log.size();
  rec.model_size = data.model.visible_count();
  if (config.completeness_max_traces > 0) {
    try {
      rec.completeness = completeness(data.log, data.model, 2, config.completeness_max_traces);
    } catch (const EmptyLanguage&) {
    }
  }

  const PetriNet truth = compile_tree_to_net(data.model);
  const std::vector<std::string> labels = data.model.visible_labels();
  rec.fold_seed = derive_seed(config.seed, {cell.id, miner, model_index, "folds"});
  Rng fold_rng(rec.fold_seed);
  FoldPlan plan = split_kfold(data.log, config.k_folds, fold_rng);

  NoiseOptions nopt;
  nopt.noise_prob = config.noise_prob;
  nopt.max_rounds = config.noise_rounds;
  nopt.replay = config.replay;

  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<Trace> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(data.log[i]);
    return out;
  };

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const Fold& fold = plan.folds[f];
    EventLog training = data.log.subset(fold.training);
    std::vector<Trace> fitting = pick(fold.fitting_test);
    std::vector<Trace> to_noise = pick(fold.to_noise);

    Rng noise_rng = make_rng(config.seed, {cell.id, miner, model_index, "noise/" + std::to_string(f)});
    std::vector<NoisedTrace> noised;
    try {
      noised = make_nonfitting(to_noise, training.traces(), truth, labels, nopt, noise_rng);
    } catch (const PoolExhausted& e) {
      rec.status = RunStatus::pool_exhausted;
      rec.message = "fold " + std::to_string(f) + ": " + e.what();
      rec.folds.clear();
      refresh_averages(rec, config.undefined_metrics);
      return rec;
    }

    PetriNet discovered;
    try {
      discovered = discoverer(training, data.model);
    } catch (const MinerFailure& e) {
      rec.status = RunStatus::miner_failed;
      rec.message = "fold " + std::to_string(f) + ": " + e.what();
      rec.folds.clear();
      refresh_averages(rec, config.undefined_metrics);
      return rec;
    }

    std::vector<Trace> negatives;
    negatives.reserve(noised.size());
    for (const auto& n : noised) negatives.push_back(n.trace);
    FoldResult result = classify_fold(discovered, fitting, negatives, config.replay);
    if (observer) {
      FoldArtifacts a{f, &data.model, &training, &fitting, &noised, &discovered, &result};
      observer(a);
    }
    rec.folds.push_back(result);
  }
  refresh_averages(rec, config.undefined_metrics);
  return rec;
}

void check_independence(const std::vector<RunRecord>& records) {
  std::set<std::string> logs;
  std::set<std::uint64_t> models;
  for (const auto& r : records) {
    if (!logs.insert(r.log_id).second) throw Error("log " + r.log_id + " is used by two runs");
    if (r.model_seed != 0 && !models.insert(r.model_seed).second)
      throw Error("model seed " + format_log_id(r.model_seed) + " is used by two runs");
  }
}

// ---------------------------------------------------------------- driver

namespace {

struct Job {
  const CellSpec* cell;
  const MinerSpec* miner;
  std::size_t model;
};

fs::path run_file(const fs::path& dir, const Job& job) {
  return dir / "runs" / job.cell->id / job.miner->name / (std::to_string(job.model) + ".json");
}

void save_artifacts(const fs::path& dir, const Job& job, const FoldArtifacts& a) {
  fs::path base = dir / "artifacts" / job.cell->id / job.miner->name / std::to_string(job.model);
  if (a.fold == 0) write_file(base / "model.tree", to_text(*a.model) + "\n");
  std::string f = "fold" + std::to_string(a.fold);
  write_file(base / (f + "_discovered.pnml"), to_pnml(*a.discovered, f));
  write_file(base / (f + "_training.jsonl"), to_jsonl(*a.training));
  std::vector<Trace> tests = *a.fitting_tests;
  for (const auto& n : *a.noised) tests.push_back(n.trace);
  write_file(base / (f + "_test.jsonl"), to_jsonl(EventLog(std::move(tests))));
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, const ExecutionOptions& options) {
  validate_config(config);
  const MinerRegistry& registry = MinerRegistry::builtin();

  std::vector<Job> jobs;
  for (const auto& cell : config.cells)
    for (const auto& miner : config.miners)
      for (std::size_t m = 0; m < config.models_per_cell; ++m) jobs.push_back({&cell, &miner, m});

  const fs::path dir = config.output_dir;
  const std::string fingerprint = config_fingerprint(config);
  std::vector<std::optional<RunRecord>> results(jobs.size());

  if (options.write_files) {
    fs::path manifest = dir / "manifest.json";
    bool reuse = false;
    if (options.resume && fs::exists(manifest)) {
      auto j = ojson::parse(read_file(manifest), nullptr, false);
      if (j.is_discarded() || !j.contains("fingerprint"))
        throw IoError(manifest.string(), "unreadable manifest");
      if (j["fingerprint"].get<std::string>() != fingerprint)
        throw ConfigInvalid("cannot resume: the config differs from the one in " + manifest.string());
      reuse = true;
    }
    if (reuse) {
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        fs::path p = run_file(dir, jobs[i]);
        if (fs::exists(p)) results[i] = run_record_from_json(read_file(p), config.undefined_metrics);
      }
    } else {
      std::error_code ec;
      fs::remove_all(dir / "runs", ec);
      fs::remove_all(dir / "artifacts", ec);
    }
    ojson m;
    m["fingerprint"] = fingerprint;
    m["runs"] = jobs.size();
    m["config"] = ojson::parse(config_to_json(config));
    write_file(manifest, m.dump(2) + "\n");
  }

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  for (const auto& r : results) done += r ? 1 : 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      if (results[i]) continue;
      const Job& job = jobs[i];
      try {
        FoldObserver observer;
        if (options.write_files && config.save_artifacts)
          observer = [&](const FoldArtifacts& a) { save_artifacts(dir, job, a); };
        RunRecord rec = execute_run(config, *job.cell, job.miner->name, job.model,
                                    registry_discoverer(*job.miner, registry), observer);
        if (options.write_files) write_file(run_file(dir, job), run_record_to_json(rec));
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(rec);
        ++done;
        if (options.progress) options.progress(done, jobs.size());
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::size_t nthreads = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> records;
  records.reserve(results.size());
  for (auto& r : results) records.push_back(std::move(*r));
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.cell_id != b.cell_id) return a.cell_id < b.cell_id;
    if (a.miner != b.miner) return a.miner < b.miner;
    return a.model_id < b.model_id;
  });
  check_independence(records);
  if (options.write_files) write_reports(dir, records, config);
  return records;
}

}  // namespace pdbench
