// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "alns/archive.hpp"
#include "alns/baseline.hpp"
#include "alns/bench.hpp"
#include "alns/evaluator.hpp"
#include "alns/evolve.hpp"
#include "alns/evolved.hpp"
#include "alns/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace alns;
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome oracle_optimality() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + static_cast<std::size_t>(trial % 4);
    const Instance inst = make_random_instance(n, rng.next());
    const RunResult r = run(inst, baseline_components(), Budget::iterations(2000), rng.next(), BaselineParams{}.engine());
    hits += r.best_cost == oracle::exhaustive_optimum(inst);
  }
  const double secs = seconds_since(t0);
  return {hits >= 95 && secs < 120, fmt("optimal in %d/100 (need >= 95), %.1fs (limit 120s)", hits, secs)};
}

Outcome insertion_oracles() {
  const std::vector<std::pair<InsertionRule, std::function<Tour(const PartialSolution&, const Instance&)>>> rules{
      {InsertionRule::greedy(), [](const PartialSolution& p, const Instance& i) { return greedy_repair(p, i); }},
      {InsertionRule::regret(2), [](const PartialSolution& p, const Instance& i) { return regret_repair(p, i, 2); }},
      {InsertionRule::regret(3), [](const PartialSolution& p, const Instance& i) { return regret_repair(p, i, 3); }},
      {hybrid_rule(HybridVariant::a),
       [](const PartialSolution& p, const Instance& i) { return hybrid_regret_repair(p, i, HybridVariant::a); }},
      {hybrid_rule(HybridVariant::b),
       [](const PartialSolution& p, const Instance& i) { return hybrid_regret_repair(p, i, HybridVariant::b); }}};
  Rng rng(77);
  int mismatches = 0;
  std::size_t steps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.below(5);
    const Instance inst = make_random_instance(n, rng.next(), trial % 2 ? 30.0 : 1000.0);
    const Tour t = random_permutation_tour(inst, rng);
    const PartialSolution p = random_destroy(t, 1 + rng.below(n - 2), rng);
    for (const auto& [rule, repair] : rules) {
      std::vector<InsertionStep> trace;
      const Tour out = insertion_repair(p, inst, rule, &trace);
      const auto expect =
          oracle::simulate_insertion(p.fragment, p.unrouted, inst, rule.order, rule.regret_weight, rule.cost_weight);
      bool same = trace.size() == expect.size() && repair(p, inst).order == out.order;
      for (std::size_t s = 0; same && s < trace.size(); ++s) {
        same = trace[s].node == expect[s].node && trace[s].after == expect[s].after && trace[s].cost == expect[s].cost;
      }
      steps += expect.size();
      mismatches += !same;
    }
  }
  return {mismatches == 0, fmt("%d mismatching repairs out of 1000 (%zu insertion steps checked)", mismatches, steps)};
}

Outcome quality_model() {
  constexpr double tol = 1e-12;
  int bad = 0;
  std::ostringstream failed;
  const auto expect = [&](const char* what, double got, double want) {
    if (std::abs(got - want) > tol) {
      ++bad;
      failed << ' ' << what;
    }
  };
  expect("s_gap(0)", s_gap(0.0), 1.0);
  expect("s_gap(.25)", s_gap(0.25), 0.8);
  expect("s_gap(1)", s_gap(1.0), 0.5);
  const std::vector<double> equal{0.1, 0.1, 0.1};
  expect("s_stab(equal)", s_stability(equal), 1.0);
  const std::vector<double> pair{0.0, 0.2};
  expect("s_stab(0,.2)", s_stability(pair), 1.0 / (1.0 + std::sqrt(0.02)));
  if (std::abs(s_stability(pair) - 0.8761) > 5e-5) {
    ++bad;
    failed << " s_stab~.8761";
  }
  expect("p_time(0)", p_time(0.0, 1.0), 1.0);
  expect("p_time(1)", p_time(1.0, 1.0), 0.5);
  const std::vector<double> usage{10, 10, 10};
  expect("p_div(10,10,10)", p_div(usage), -1.0);

  EvalMetrics perfect;
  perfect.gaps = {0.0, 0.0};
  expect("destroy(1,1)", quality(Slot::destroy, perfect), 1.0);
  // S_gap = 0.8 needs mean gap 0.25; S_stab = 0.9 needs sample sd 1/9.
  EvalMetrics m;
  const double d = std::sqrt(2.0) / 18.0;
  m.gaps = {0.25 - d, 0.25 + d};
  m.mean_gap = 0.25;
  expect("destroy(.8,.9)", quality(Slot::destroy, m), 0.82);
  // S_gap = 0.9 needs mean gap 1/9; P_time = 0.5 needs t = 1 with c = 1.
  EvalMetrics init;
  init.gaps = {1.0 / 9, 1.0 / 9};
  init.mean_gap = 1.0 / 9;
  init.mean_seconds = 1.0;
  expect("init(.9,.5)", quality(Slot::initializer, init), 0.45);
  return {bad == 0, bad == 0 ? "13 worked examples within 1e-12" : "mismatch:" + failed.str()};
}

Outcome acceptance_laws() {
  const int trials = 100000;
  const double temperature = 100.0 / std::log(2.0);  // T ln 2 = 100
  Rng rng(5);
  int sa = 0;
  int tol = 0;
  for (int i = 0; i < trials; ++i) {
    sa += sa_accept(100, temperature, rng);
    tol += tolerance_accept(137, temperature, 37.0, rng);
  }
  const double f_sa = sa / double(trials);
  const double f_tol = tol / double(trials);

  Rng a(9), b(9), draw(10);
  int disagreements = 0;
  for (int i = 0; i < trials; ++i) {
    const Cost delta = static_cast<Cost>(draw.below(400)) - 100;
    const double t = draw.uniform(0.5, 500.0);
    disagreements += tolerance_accept(delta, t, 0.0, a) != sa_accept(delta, t, b);
  }
  const bool pass = std::abs(f_sa - 0.5) <= 0.02 && std::abs(f_tol - 0.5) <= 0.02 && disagreements == 0;
  return {pass, fmt("sa %.4f, tolerance %.4f (0.5 +/- 0.02), t_a=0 disagreements %d/%d", f_sa, f_tol,
                    disagreements, trials)};
}

Outcome map_elites() {
  Rng rng(31);
  int violations = 0;
  std::size_t max_size[2] = {0, 0};
  const Slot tasks[2] = {Slot::acceptance, Slot::initializer};
  for (int t = 0; t < 2; ++t) {
    EvolveConfig cfg;
    cfg.task = tasks[t];
    const GridSpec grid = grid_for(cfg.task);
    EliteArchive archive(grid, cfg.archive_capacity());
    const std::size_t dims = grid.dims();
    for (int i = 0; i < 10000; ++i) {
      Elite e;
      e.genome = seed_genome(cfg.task);
      e.quality = std::round(rng.uniform() * 200) / 200;
      for (std::size_t k = 0; k < dims; ++k) {
        const auto [lo, hi] = grid.ranges[k];
        e.descriptor.push_back(rng.uniform(lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo)));
      }
      const std::map<Cell, Elite> before = archive.cells();
      archive.insert(e);
      for (const auto& [cell, old] : before) {
        const Elite* now = archive.at(cell);
        if (now && now->quality < old.quality) ++violations;
      }
      if (archive.size() > cfg.archive_capacity()) ++violations;
      max_size[t] = std::max(max_size[t], archive.size());
    }
  }

  int migration_errors = 0;
  for (std::size_t size = 1; size <= 20; ++size) {
    std::vector<EliteArchive> islands;
    for (int island = 0; island < 2; ++island) {
      EliteArchive a(grid_for(Slot::acceptance), 20);
      for (std::size_t c = 0; c < size; ++c) {
        Elite e;
        e.genome = seed_genome(Slot::acceptance);
        e.quality = 0.1 * island + 0.01 * static_cast<double>(c);
        e.descriptor = {0.2 * static_cast<double>(c % 5) + 0.1, 0.25 * static_cast<double>(c / 5) + 0.1};
        a.insert(e);
      }
      islands.push_back(a);
    }
    const auto sent = migrate(islands, 0.1);
    const auto want = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(size)));
    for (auto s : sent) migration_errors += s != want;
  }
  const bool pass = violations == 0 && max_size[0] == 20 && max_size[1] == 50 && migration_errors == 0;
  return {pass, fmt("%d monotonicity/capacity violations over 2x10000 inserts, peak sizes %zu/20 and %zu/50, "
                    "%d wrong migration counts",
                    violations, max_size[0], max_size[1], migration_errors)};
}

Outcome wilcoxon() {
  Rng rng(61);
  double worst = 0;
  int datasets = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int k = 0; k < 50; ++k) {
      std::vector<double> d;
      for (int i = 0; i < n; ++i) {
        // alternate between tie-heavy integers and continuous values
        double x = k % 2 ? static_cast<double>(1 + rng.below(4)) : rng.uniform(0.01, 3.0);
        d.push_back(rng.uniform() < 0.5 ? -x : x);
      }
      const auto r = wilcoxon_signed_rank(d);
      worst = std::max(worst, std::abs(r.p_value - oracle::wilcoxon_enumerated_p(d)));
      ++datasets;
    }
  }
  const std::vector<double> pos{1, 2, 3, 4, 5, 6, 7, 8};
  const double p8 = wilcoxon_signed_rank(pos).p_value;
  return {worst <= 1e-12 && std::abs(p8 - 0.0078125) <= 1e-12,
          fmt("max |p - enumeration| %.3g over %d datasets, n=8 all-positive p=%.7f", worst, datasets, p8)};
}

const std::vector<std::string> kSmallEvo{"eil51", "berlin52", "st70", "eil76", "pr76", "rat99"};

const BenchmarkData& small_evo_data() {
  static const BenchmarkData data = [] {
    const auto dir = testing::data_dir();
    return BenchmarkData::load(dir / "tsplib", dir / "bks.txt", dir / "benchmark_sets.txt", kSmallEvo);
  }();
  return data;
}

ExperimentPlan headline_plan() {
  ExperimentPlan plan;
  plan.variants = {named_variant("baseline"), named_variant("evolved")};
  plan.budget = Budget::iterations(1000);
  plan.instances = kSmallEvo;
  plan.repetitions = 10;
  plan.master_seed = 42;
  return plan;
}

struct Headline {
  ExperimentResult result;
  Comparison comparison;
  double seconds = 0;
  // Everything the experiment writes, minus wall-clock columns.
  std::string csv() const {
    return result.to_csv(false) + result.report("baseline").to_csv(false) + comparison_header() + '\n' +
           to_csv(comparison) + '\n';
  }
};

Headline run_headline() {
  const auto t0 = Clock::now();
  Headline h;
  h.result = run_experiment(headline_plan(), small_evo_data());
  const auto a = h.result.paired_gaps("baseline");
  const auto b = h.result.paired_gaps("evolved");
  h.comparison = compare_paired("baseline", "evolved", a, b);
  h.seconds = seconds_since(t0);
  return h;
}

std::optional<Headline> g_headline;

const Headline& headline() {
  if (!g_headline) g_headline = run_headline();
  return *g_headline;
}

Outcome directional_headline() {
  const Headline& h = headline();
  const double base = h.result.mean_gap("baseline");
  const double evo = h.result.mean_gap("evolved");
  const double p = h.comparison.test.p_value;
  const bool pass = evo < base && p < 0.05 && evo <= 2.0 && h.seconds < 900;
  return {pass, fmt("mean gap baseline %.4f%% vs evolved %.4f%% (need evolved lower), Wilcoxon p=%.4g (need < 0.05), "
                    "evolved <= 2.0%%: %s, %.1fs (limit 900s)",
                    base, evo, p, evo <= 2.0 ? "yes" : "no", h.seconds)};
}

Outcome ablation_direction() {
  const Variant full = named_variant("evolved");
  const Variant base = named_variant("baseline");
  const ExperimentPlan plan = headline_plan();
  std::map<Slot, AblationResult> r;
  for (Slot s : {Slot::destroy, Slot::degree, Slot::selector, Slot::weight_updater}) {
    r[s] = ablate(full, base, s, plan, small_evo_data());
  }
  const double destroy = r[Slot::destroy].impact;
  const double degree = r[Slot::degree].impact;
  const double selector = r[Slot::selector].impact;
  const double weights = r[Slot::weight_updater].impact;
  const bool pass = destroy < 0 && degree < 0 && std::abs(selector) < std::abs(destroy) &&
                    std::abs(weights) < std::abs(destroy);
  return {pass, fmt("impact destroy %+.1f%%, degree %+.1f%% (both need < 0); selector %+.1f%%, weight updater %+.1f%% "
                    "(need |.| < |destroy|); full-variant gap %.4f%%",
                    destroy, degree, selector, weights, r[Slot::destroy].gap_full)};
}

Outcome evolution_smoke() {
  const auto t0 = Clock::now();
  TaskSpec spec;
  spec.task = Slot::acceptance;
  spec.instances = default_eval_instances();
  spec.seeds_per_instance = 2;
  const auto dir = testing::data_dir();
  const BksTable bks = BksTable::load(dir / "bks.txt");
  std::vector<Instance> inst;
  std::vector<Cost> costs;
  for (const auto& n : spec.instances) {
    inst.push_back(load_tsplib(dir / "tsplib" / (n + ".tsp")));
    costs.push_back(bks.at(n));
  }
  const Evaluator evaluator(spec, std::move(inst), std::move(costs));
  EvolveConfig cfg;
  cfg.task = Slot::acceptance;
  cfg.islands = 2;
  cfg.generations = 50;
  cfg.seed = 42;
  MutationProposer proposer;
  const EvolveResult a = evolve_task(cfg, evaluator, proposer);
  const double first_run = seconds_since(t0);
  const EvolveResult b = evolve_task(cfg, evaluator, proposer);
  bool identical = a.best_history == b.best_history && a.best.to_json() == b.best.to_json();
  for (std::size_t i = 0; i < a.archives.size(); ++i) {
    identical = identical && a.archives[i].to_json().dump() == b.archives[i].to_json().dump();
  }
  const bool pass = a.best.quality >= a.seed.quality && identical && first_run < 1800;
  return {pass, fmt("best %.6f (%s) vs seed %.6f, reproducible: %s, %.1fs per run (limit 1800s)", a.best.quality,
                    a.best.genome.family.c_str(), a.seed.quality, identical ? "yes" : "no", first_run)};
}

Outcome determinism() {
  const std::string first = headline().csv();
  const Headline again = run_headline();
  const std::string second = again.csv();
  return {first == second, fmt("%zu bytes of CSV, rerun %s", first.size(), first == second ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle optimality on small instances", oracle_optimality},
      {"insertion rules match enumeration", insertion_oracles},
      {"quality model worked examples", quality_model},
      {"acceptance laws", acceptance_laws},
      {"archive invariants and migration", map_elites},
      {"signed-rank test correctness", wilcoxon},
      {"evolved beats baseline on small instances", directional_headline},
      {"ablation direction", ablation_direction},
      {"evolution smoke test", evolution_smoke},
      {"experiment determinism", determinism}};

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d: %s - %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
