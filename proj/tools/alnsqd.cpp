// alnsqd: solve, evolve, bench, ablate and stats workflows.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "alns/bench.hpp"
#include "alns/config.hpp"
#include "alns/evolve.hpp"
#include "alns/log.hpp"
#include "alns/stats.hpp"

#ifndef ALNS_DATA_DIR
#define ALNS_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace alns;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// <out>/<prefix>-YYYYmmdd-HHMMSS, with a numeric suffix if that already exists.
fs::path make_run_dir(const fs::path& out, const std::string& prefix) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream name;
  name << prefix << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
  fs::create_directories(out);
  fs::path dir = out / name.str();
  for (int i = 1; !fs::create_directory(dir); ++i) dir = out / (name.str() + "-" + std::to_string(i));
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  if (fs::exists(path)) throw std::runtime_error("refusing to overwrite " + path.string());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

fs::path resolve_instance(const std::string& arg, const Config& cfg) {
  if (fs::is_regular_file(arg)) return arg;
  const fs::path named = cfg.paths.instances_dir / (arg + ".tsp");
  if (fs::is_regular_file(named)) return named;
  throw std::runtime_error("no such instance: " + arg);
}

Genome load_genome_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read genome file " + path.string());
  const auto j = nlohmann::json::parse(in);
  Genome g = Genome::from_json(j.contains("genome") ? j.at("genome") : j);
  g.validate();
  return g;
}

// "baseline", "evolved", or a genome file evaluated against the fixed base.
Variant resolve_variant(const std::string& name, const Config& cfg) {
  if (name == "baseline" || name == "evolved") return named_variant(name, cfg.baseline, cfg.evolved);
  if (fs::is_regular_file(name)) {
    const Genome g = load_genome_file(name);
    ComponentSet set = fixed_base(g.task);
    apply_genome(set, g);
    return {fs::path(name).stem().string(), std::move(set), cfg.evaluation.engine};
  }
  throw UsageError("unknown variant '" + name + "' (baseline, evolved or a genome file)");
}

std::vector<std::string> resolve_instances(const std::vector<std::string>& tokens, const Config& cfg) {
  const BenchmarkSets sets = BenchmarkSets::load(cfg.paths.sets_file);
  std::vector<std::string> out;
  const auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  for (const auto& t : tokens) {
    if (t == "evo" || t == "test") {
      for (const auto& n : sets.names(t == "evo" ? Membership::evo : Membership::test)) add(n);
      continue;
    }
    bool is_group = false;
    for (Group g : {Group::small_evo, Group::medium_evo, Group::med_small_test, Group::large_test}) {
      if (t != to_string(g)) continue;
      is_group = true;
      const Membership m = g == Group::small_evo || g == Group::medium_evo ? Membership::evo : Membership::test;
      for (const auto& n : sets.names(m)) {
        if (group_of(load_tsplib(cfg.paths.instances_dir / (n + ".tsp")).size(), m) == g) add(n);
      }
    }
    if (!is_group) add(t);
  }
  if (out.empty()) throw UsageError("no instances selected");
  return out;
}

BenchmarkData load_data(const Config& cfg, const std::vector<std::string>& names) {
  std::vector<std::string> missing;
  const BksTable bks = BksTable::load(cfg.paths.bks_file);
  for (const auto& n : names) {
    if (!bks.contains(n)) missing.push_back(n);
  }
  if (!missing.empty()) {
    std::string msg = "missing best-known costs for:";
    for (const auto& n : missing) msg += " " + n;
    throw std::runtime_error(msg);
  }
  return BenchmarkData::load(cfg.paths.instances_dir, cfg.paths.bks_file, cfg.paths.sets_file, names);
}

ExperimentPlan make_plan(const Config& cfg, const std::vector<std::string>& instances) {
  ExperimentPlan plan;
  plan.budget = budget_for(parse_budget_setting(cfg.bench.setting));
  plan.instances = instances;
  plan.repetitions = cfg.bench.repetitions;
  plan.master_seed = cfg.seed;
  plan.threads = cfg.bench.threads;
  return plan;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

struct Globals {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

Config load_config(const Globals& g) {
  Config cfg = g.config_file.empty() ? Config::defaults(ALNS_DATA_DIR) : Config::load(g.config_file, ALNS_DATA_DIR);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.paths.output_dir = g.out;
  return cfg;
}

// solve ------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  std::string variant = "evolved";
  std::optional<std::int64_t> iters;
  std::optional<std::int64_t> time;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  Config cfg = load_config(g);
  cfg.validate();
  const Instance inst = load_tsplib(resolve_instance(a.instance, cfg));
  const Variant v = resolve_variant(a.variant, cfg);
  const Budget budget = a.time ? Budget::seconds(*a.time) : Budget::iterations(a.iters.value_or(1000));
  const RunResult res = run(inst, v.set, budget, cfg.seed, v.engine);

  RunRecordRow row{inst.name(), cfg.seed, budget, res.best_cost, std::nullopt, res.elapsed_seconds};
  const BksTable bks = BksTable::load(cfg.paths.bks_file);
  if (bks.contains(inst.name())) row.gap_percent = gap_percent(res.best_cost, bks.at(inst.name()));

  const fs::path dir = make_run_dir(cfg.paths.output_dir, "solve-" + inst.name());
  write_file(dir / "run.csv", run_record_header() + "\n" + to_csv(row) + "\n");
  std::ostringstream tour;
  for (Node v_ : res.best_tour.order) tour << v_ + 1 << '\n';
  write_file(dir / "tour.txt", tour.str());

  std::cout << "instance    " << inst.name() << " (n=" << inst.size() << ")\n"
            << "variant     " << v.name << "\n"
            << "budget      " << budget.mode_name() << " " << budget.limit << "\n"
            << "best_cost   " << res.best_cost << "\n"
            << "gap_percent " << (row.gap_percent ? fmt(*row.gap_percent, 4) : std::string("n/a")) << "\n"
            << "iterations  " << res.iterations_done << "\n"
            << "elapsed_s   " << fmt(res.elapsed_seconds, 3) << "\n"
            << "output      " << dir.string() << "\n";
  return 0;
}

// evolve -----------------------------------------------------------------

struct EvolveArgs {
  std::string task;
  std::optional<int> generations;
  std::optional<int> islands;
  std::string proposer;
  std::string endpoint;
  std::string model;
  std::string resume;
};

int cmd_evolve(const Globals& g, const EvolveArgs& a) {
  Config cfg = load_config(g);
  Slot task;
  try {
    task = parse_slot(a.task);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (a.generations) cfg.evolve.generations = *a.generations;
  if (a.islands) cfg.evolve.islands = *a.islands;
  if (!a.proposer.empty()) cfg.proposer.mode = a.proposer;
  if (!a.endpoint.empty()) cfg.proposer.llm.base_url = a.endpoint;
  if (!a.model.empty()) cfg.proposer.llm.model = a.model;
  cfg.validate();

  TaskSpec spec;
  spec.task = task;
  spec.instances = cfg.evaluation.instances.empty() ? default_eval_instances() : cfg.evaluation.instances;
  spec.iterations = cfg.evaluation.iterations;
  spec.seeds_per_instance = cfg.evaluation.seeds_per_instance;
  spec.weights.time_scale = cfg.evaluation.time_scale;
  spec.engine = cfg.evaluation.engine;
  spec.validate();
  const BenchmarkData data = load_data(cfg, spec.instances);
  std::vector<Instance> instances;
  std::vector<Cost> bks;
  for (const auto& n : spec.instances) {
    instances.push_back(data.instances.find(n)->second);
    bks.push_back(data.bks.at(n));
  }
  const Evaluator evaluator(spec, std::move(instances), std::move(bks));

  std::unique_ptr<Proposer> proposer;
  LlmProposer* llm = nullptr;
  if (cfg.proposer.mode == "llm") {
    auto p = std::make_unique<LlmProposer>(cfg.proposer.llm, cfg.evolve.mutation);
    llm = p.get();
    proposer = std::move(p);
  } else {
    proposer = std::make_unique<MutationProposer>(cfg.evolve.mutation);
  }

  fs::path dir;
  if (!a.resume.empty()) {
    dir = a.resume;
    if (!fs::is_directory(dir / "checkpoints")) throw UsageError("no checkpoints under " + dir.string());
  } else {
    dir = make_run_dir(cfg.paths.output_dir, "evolve-" + std::string(to_string(task)));
    write_file(dir / "config.json", cfg.to_json().dump(2) + "\n");
  }

  EvolveConfig ec = cfg.evolve;
  ec.task = task;
  ec.seed = cfg.seed;
  ec.checkpoint_dir = dir / "checkpoints";
  log_info("evolving " + std::string(to_string(task)) + " with " + std::to_string(ec.island_count()) +
           " islands for " + std::to_string(ec.generations) + " generations into " + dir.string());
  const EvolveResult res = evolve_task(ec, evaluator, *proposer, [&](int gen, double best) {
    if (!g.quiet && ((gen + 1) % 10 == 0 || gen + 1 == ec.generations)) {
      log_info("generation " + std::to_string(gen + 1) + " best quality " + fmt(best, 6));
    }
  });

  // Final artifacts are rewritten on resume, so they go to a fresh name when present.
  fs::path final_dir = dir / "final";
  for (int i = 1; fs::exists(final_dir); ++i) final_dir = dir / ("final-" + std::to_string(i));
  fs::create_directories(final_dir);
  for (std::size_t i = 0; i < res.archives.size(); ++i) {
    write_file(final_dir / ("island_" + std::to_string(i) + ".json"), res.archives[i].to_json().dump(2) + "\n");
  }
  write_file(final_dir / "best_genome.json", res.best.genome.to_json().dump(2) + "\n");
  write_file(final_dir / "best_elite.json", res.best.to_json().dump(2) + "\n");
  std::string history = "generation,best_quality\n";
  for (std::size_t i = 0; i < res.best_history.size(); ++i) {
    history += std::to_string(i) + "," + fmt(res.best_history[i], 12) + "\n";
  }
  write_file(final_dir / "history.csv", history);
  nlohmann::json summary = {{"task", std::string(to_string(task))},
                            {"seed", cfg.seed},
                            {"islands", res.archives.size()},
                            {"generations", res.generations_done},
                            {"resumed_from", res.resumed_from},
                            {"seed_quality", res.seed.quality},
                            {"best_quality", res.best.quality},
                            {"best_family", res.best.genome.family},
                            {"evaluation_failures", res.evaluation_failures}};
  if (llm) {
    summary["llm_requests"] = llm->requests();
    summary["llm_fallbacks"] = llm->fallbacks();
  }
  write_file(final_dir / "summary.json", summary.dump(2) + "\n");

  std::cout << "task          " << to_string(task) << "\n"
            << "islands       " << res.archives.size() << "\n"
            << "seed_quality  " << fmt(res.seed.quality, 6) << "\n"
            << "best_quality  " << fmt(res.best.quality, 6) << "\n"
            << "best_family   " << res.best.genome.family << "\n"
            << "output        " << final_dir.string() << "\n";
  return 0;
}

// bench / ablate / stats ---------------------------------------------------

struct BenchArgs {
  std::string setting;
  std::string variants;
  std::string instances;
  std::optional<int> reps;
  std::string reference;
  std::string slots = "destroy";
  std::string full = "evolved";
  std::string baseline = "baseline";
  std::string pairs;
  std::string runs;
  bool no_timing = false;
};

void apply_bench_overrides(Config& cfg, const BenchArgs& a) {
  if (!a.setting.empty()) cfg.bench.setting = a.setting;
  if (!a.variants.empty()) cfg.bench.variants = split(a.variants, ',');
  if (!a.instances.empty()) cfg.bench.instances = split(a.instances, ',');
  if (a.reps) cfg.bench.repetitions = *a.reps;
  try {
    parse_budget_setting(cfg.bench.setting);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

int cmd_bench(const Globals& g, const BenchArgs& a) {
  Config cfg = load_config(g);
  apply_bench_overrides(cfg, a);
  cfg.validate();
  const auto names = resolve_instances(cfg.bench.instances, cfg);
  ExperimentPlan plan = make_plan(cfg, names);
  for (const auto& v : cfg.bench.variants) plan.variants.push_back(resolve_variant(v, cfg));
  const BenchmarkData data = load_data(cfg, names);
  log_info("running " + std::to_string(plan.variants.size() * names.size() * plan.repetitions) + " runs");
  const ExperimentResult res = run_experiment(plan, data);
  const std::string reference = a.reference.empty() ? plan.variants.front().name : a.reference;
  const GroupedReport report = res.report(reference);

  const fs::path dir = make_run_dir(cfg.paths.output_dir, "bench");
  write_file(dir / "runs.csv", res.to_csv(!a.no_timing));
  write_file(dir / "report.csv", report.to_csv(!a.no_timing));
  std::cout << report.to_csv(!a.no_timing) << "output " << dir.string() << "\n";
  return 0;
}

int cmd_ablate(const Globals& g, const BenchArgs& a) {
  Config cfg = load_config(g);
  apply_bench_overrides(cfg, a);
  cfg.validate();
  std::vector<Slot> slots;
  for (const auto& s : split(a.slots, ',')) {
    if (s == "all") {
      slots.assign(std::begin(kAllSlots), std::end(kAllSlots));
      continue;
    }
    try {
      slots.push_back(parse_slot(s));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (slots.empty()) throw UsageError("no slot given");
  const auto names = resolve_instances(cfg.bench.instances, cfg);
  const Variant full = resolve_variant(a.full, cfg);
  const Variant base = resolve_variant(a.baseline, cfg);
  ExperimentPlan plan = make_plan(cfg, names);
  plan.variants = {full};
  for (Slot s : slots) {
    plan.variants.push_back({full.name + "-no-" + std::string(to_string(s)), substitute_slot(full.set, base.set, s),
                             full.engine});
  }
  const BenchmarkData data = load_data(cfg, names);
  const ExperimentResult res = run_experiment(plan, data);
  const double gap_full = res.mean_gap(full.name);

  std::ostringstream csv;
  csv.precision(10);
  csv << "slot,gap_full,gap_ablated,impact_percent\n";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double gap_ablated = res.mean_gap(plan.variants[i + 1].name);
    csv << to_string(slots[i]) << ',' << gap_full << ',' << gap_ablated << ','
        << ablation_impact(gap_full, gap_ablated) << '\n';
  }
  const fs::path dir = make_run_dir(cfg.paths.output_dir, "ablate");
  write_file(dir / "runs.csv", res.to_csv(!a.no_timing));
  write_file(dir / "ablation.csv", csv.str());
  std::cout << csv.str() << "output " << dir.string() << "\n";
  return 0;
}

// Per-variant gaps keyed by (instance, seed) from a runs.csv file.
std::map<std::string, std::map<std::pair<std::string, std::string>, double>> read_runs(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  const auto header = split(line, ',');
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error(path.string() + " lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cv = col("variant"), ci = col("instance"), cs = col("seed"), cg = col("gap_percent");
  std::map<std::string, std::map<std::pair<std::string, std::string>, double>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() < header.size() - 1) throw std::runtime_error("short row in " + path.string());
    out[f[cv]][{f[ci], f[cs]}] = std::stod(f[cg]);
  }
  return out;
}

int cmd_stats(const Globals& g, const BenchArgs& a) {
  Config cfg = load_config(g);
  apply_bench_overrides(cfg, a);
  cfg.validate();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : split(a.pairs.empty() ? "baseline:evolved" : a.pairs, ',')) {
    const auto colon = p.find(':');
    if (colon == std::string::npos) throw UsageError("pair '" + p + "' is not of the form A:B");
    pairs.emplace_back(p.substr(0, colon), p.substr(colon + 1));
  }

  std::map<std::string, std::map<std::pair<std::string, std::string>, double>> gaps;
  const fs::path dir = make_run_dir(cfg.paths.output_dir, "stats");
  if (!a.runs.empty()) {
    gaps = read_runs(a.runs);
  } else {
    std::vector<std::string> variants;
    for (const auto& [x, y] : pairs) {
      for (const auto& v : {x, y}) {
        if (std::find(variants.begin(), variants.end(), v) == variants.end()) variants.push_back(v);
      }
    }
    const auto names = resolve_instances(cfg.bench.instances, cfg);
    ExperimentPlan plan = make_plan(cfg, names);
    for (const auto& v : variants) plan.variants.push_back(resolve_variant(v, cfg));
    const ExperimentResult res = run_experiment(plan, load_data(cfg, names));
    write_file(dir / "runs.csv", res.to_csv(!a.no_timing));
    for (const auto& r : res.records) gaps[r.variant][{r.instance, std::to_string(r.seed)}] = r.gap_percent;
  }

  std::string csv = comparison_header() + "\n";
  for (const auto& [x, y] : pairs) {
    if (!gaps.count(x) || !gaps.count(y)) throw UsageError("no runs for pair " + x + ":" + y);
    std::vector<double> xa, xb;
    for (const auto& [key, gap] : gaps[x]) {
      const auto it = gaps[y].find(key);
      if (it == gaps[y].end()) continue;
      xa.push_back(gap);
      xb.push_back(it->second);
    }
    if (xa.empty()) throw std::runtime_error("pair " + x + ":" + y + " shares no (instance, seed) runs");
    try {
      csv += to_csv(compare_paired(x, y, xa, xb)) + "\n";
    } catch (const std::invalid_argument& e) {
      log_warning(x + ":" + y + ": " + e.what());
      csv += x + "," + y + ",0,,,false\n";
    }
  }
  write_file(dir / "stats.csv", csv);
  std::cout << csv << "output " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALNS for the TSP with quality-diversity component evolution"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory (a timestamped subdirectory is created)");
  app.add_flag("-q,--quiet", g.quiet, "Only warnings and errors on stderr");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("instance", sa.instance, "TSPLIB file or bundled instance name")->required();
  solve->add_option("--variant", sa.variant, "baseline, evolved or a genome JSON file");
  auto* iters = solve->add_option("--iters", sa.iters, "Iteration budget (default 1000)");
  solve->add_option("--time", sa.time, "Wall-clock budget in seconds")->excludes(iters);

  EvolveArgs ea;
  auto* evolve = app.add_subcommand("evolve", "Evolve one component with island MAP-Elites");
  evolve->add_option("--task", ea.task, "destroy, repair, init, selector, weight, acceptance or degree")->required();
  evolve->add_option("--generations", ea.generations, "Generations per island");
  evolve->add_option("--islands", ea.islands, "Island count (default 2, 4 for init)");
  evolve->add_option("--proposer", ea.proposer, "mutate or llm")->check(CLI::IsMember({"mutate", "llm"}));
  evolve->add_option("--endpoint", ea.endpoint, "Chat-completions base URL for the llm proposer");
  evolve->add_option("--model", ea.model, "Model name for the llm proposer");
  evolve->add_option("--resume", ea.resume, "Continue an earlier evolve output directory");

  BenchArgs ba;
  const auto add_plan_options = [&](CLI::App* sub) {
    sub->add_option("--setting", ba.setting, "iters1000, time60 or iters25000");
    sub->add_option("--instances", ba.instances, "Comma list of names, evo, test or a group name");
    sub->add_option("--reps", ba.reps, "Repetitions per instance");
    sub->add_flag("--no-timing", ba.no_timing, "Omit wall-clock columns so outputs are byte-reproducible");
  };
  auto* bench = app.add_subcommand("bench", "Run variants over an instance set");
  add_plan_options(bench);
  bench->add_option("--variants", ba.variants, "Comma list of baseline, evolved or genome files");
  bench->add_option("--reference", ba.reference, "Variant the improvement column is relative to");

  auto* ablate = app.add_subcommand("ablate", "Swap components of the full variant for baseline ones");
  add_plan_options(ablate);
  ablate->add_option("--slot", ba.slots, "Comma list of component slots, or all");
  ablate->add_option("--full", ba.full, "Full variant");
  ablate->add_option("--baseline", ba.baseline, "Variant supplying the replacement components");

  auto* stats = app.add_subcommand("stats", "Paired Wilcoxon signed-rank tests");
  add_plan_options(stats);
  stats->add_option("--pairs", ba.pairs, "Comma list of A:B pairs (default baseline:evolved)");
  stats->add_option("--runs", ba.runs, "Existing runs.csv instead of running the experiment")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (g.quiet) set_log_level(LogLevel::warning);

  try {
    if (solve->parsed()) return cmd_solve(g, sa);
    if (evolve->parsed()) return cmd_evolve(g, ea);
    if (bench->parsed()) return cmd_bench(g, ba);
    if (ablate->parsed()) return cmd_ablate(g, ba);
    if (stats->parsed()) return cmd_stats(g, ba);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
