#include "alns/bench.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <sstream>
#include <thread>

#include "alns/baseline.hpp"
#include "alns/evolved.hpp"

namespace alns {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v, int precision = 10) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

}  // namespace

Variant named_variant(const std::string& name) { return named_variant(name, BaselineParams{}, EvolvedParams{}); }

Variant named_variant(const std::string& name, const BaselineParams& baseline, const EvolvedParams& evolved) {
  if (name == "baseline") return {name, baseline_components(baseline), baseline.engine()};
  if (name == "evolved") return {name, evolved_components(evolved), evolved.engine()};
  throw std::invalid_argument("unknown variant '" + name + "' (expected baseline or evolved)");
}

Budget budget_for(BudgetSetting setting) {
  switch (setting) {
    case BudgetSetting::iters_1000: return Budget::iterations(1000);
    case BudgetSetting::time_60s: return Budget::seconds(60);
    case BudgetSetting::iters_25000: return Budget::iterations(25000);
  }
  throw std::logic_error("bad budget setting");
}

BudgetSetting parse_budget_setting(std::string_view text) {
  if (text == "iters1000" || text == "iters_1000") return BudgetSetting::iters_1000;
  if (text == "time60" || text == "time_60s" || text == "time60s") return BudgetSetting::time_60s;
  if (text == "iters25000" || text == "iters_25000") return BudgetSetting::iters_25000;
  throw std::invalid_argument("unknown budget setting '" + std::string(text) + "'");
}

std::string_view to_string(Group group) {
  switch (group) {
    case Group::small_evo: return "Small-Evo";
    case Group::medium_evo: return "Medium-Evo";
    case Group::med_small_test: return "Med-Small-Test";
    case Group::large_test: return "Large-Test";
  }
  return "?";
}

BenchmarkSets BenchmarkSets::parse(std::string_view text) {
  BenchmarkSets sets;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw std::runtime_error("benchmark set line lacks ':': " + t);
    const std::string set = trim(std::string_view(t).substr(0, colon));
    Membership m;
    if (set == "evo") m = Membership::evo;
    else if (set == "test") m = Membership::test;
    else throw std::runtime_error("unknown benchmark set '" + set + "'");
    std::istringstream names(t.substr(colon + 1));
    std::string name;
    while (names >> name) {
      if (!sets.members_.emplace(name, m).second) throw std::runtime_error("instance listed twice: " + name);
    }
  }
  return sets;
}

BenchmarkSets BenchmarkSets::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

Membership BenchmarkSets::membership(std::string_view name) const {
  const auto it = members_.find(name);
  if (it == members_.end()) throw std::out_of_range("instance '" + std::string(name) + "' is in no benchmark set");
  return it->second;
}

bool BenchmarkSets::contains(std::string_view name) const { return members_.find(name) != members_.end(); }

std::vector<std::string> BenchmarkSets::names(Membership m) const {
  std::vector<std::string> out;
  for (const auto& [name, mm] : members_) {
    if (mm == m) out.push_back(name);
  }
  return out;
}

Group group_of(std::size_t n, Membership membership) {
  if (membership == Membership::evo) return n <= 105 ? Group::small_evo : Group::medium_evo;
  return n <= 300 ? Group::med_small_test : Group::large_test;
}

Group group_of(std::string_view name, std::size_t n, const BenchmarkSets& sets) {
  return group_of(n, sets.membership(name));
}

void ExperimentPlan::validate() const {
  if (variants.empty()) throw std::invalid_argument("plan has no variants");
  if (instances.empty()) throw std::invalid_argument("plan has no instances");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (budget.limit < 1) throw std::invalid_argument("budget must be positive");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    variants[i].set.validate();
    variants[i].engine.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (variants[i].name == variants[j].name) throw std::invalid_argument("duplicate variant " + variants[i].name);
    }
  }
}

std::uint64_t experiment_seed(std::uint64_t master, const std::string& instance, int rep) {
  return derive_seed(derive_seed(master, instance), static_cast<std::uint64_t>(rep));
}

std::string record_header(bool include_timing) {
  std::string h = "variant,instance,group,seed,budget_mode,budget,best_cost,bks,gap_percent,iterations";
  if (include_timing) h += ",seconds";
  return h;
}

std::string to_csv(const RunRecord& r, bool include_timing) {
  std::ostringstream out;
  out << r.variant << ',' << r.instance << ',' << to_string(r.group) << ',' << r.seed << ','
      << r.budget.mode_name() << ',' << r.budget.limit << ',' << r.best_cost << ',' << r.bks << ','
      << format_double(r.gap_percent) << ',' << r.iterations;
  if (include_timing) out << ',' << format_double(r.seconds, 6);
  return out.str();
}

std::string GroupedReport::to_csv(bool include_timing) const {
  std::ostringstream out;
  out << "variant,group,runs,mean_gap_percent,mean_iterations";
  if (include_timing) out << ",mean_seconds";
  out << ",improvement_percent\n";
  for (const auto& row : rows) {
    out << row.variant << ',' << to_string(row.group) << ',' << row.runs << ',' << format_double(row.mean_gap) << ','
        << format_double(row.mean_iterations);
    if (include_timing) out << ',' << format_double(row.mean_seconds, 6);
    out << ',' << (row.improvement_percent ? format_double(*row.improvement_percent) : "") << '\n';
  }
  return out.str();
}

double improvement_percent(double base_gap, double variant_gap) {
  if (base_gap == variant_gap) return 0.0;
  return (base_gap - variant_gap) / base_gap * 100.0;
}

double ablation_impact(double gap_full, double gap_ablated) {
  if (gap_full == gap_ablated) return 0.0;
  return (gap_full - gap_ablated) / gap_full * 100.0;
}

BenchmarkData BenchmarkData::load(const std::filesystem::path& tsplib_dir, const std::filesystem::path& bks_file,
                                  const std::filesystem::path& sets_file, const std::vector<std::string>& names) {
  BenchmarkData data{{}, BksTable::load(bks_file), BenchmarkSets::load(sets_file)};
  for (const auto& name : names) {
    if (data.instances.find(name) != data.instances.end()) continue;
    data.instances.emplace(name, load_tsplib(tsplib_dir / (name + ".tsp")));
  }
  return data;
}

GroupedReport ExperimentResult::report(const std::string& reference) const {
  struct Acc {
    std::size_t runs = 0;
    double gap = 0, seconds = 0, iterations = 0;
  };
  std::vector<std::string> variant_order;
  std::map<std::pair<std::string, Group>, Acc> acc;
  for (const auto& r : records) {
    if (std::find(variant_order.begin(), variant_order.end(), r.variant) == variant_order.end()) {
      variant_order.push_back(r.variant);
    }
    Acc& a = acc[{r.variant, r.group}];
    ++a.runs;
    a.gap += r.gap_percent;
    a.seconds += r.seconds;
    a.iterations += static_cast<double>(r.iterations);
  }
  GroupedReport report;
  report.reference = reference;
  for (const auto& v : variant_order) {
    for (Group g : {Group::small_evo, Group::medium_evo, Group::med_small_test, Group::large_test}) {
      const auto it = acc.find({v, g});
      if (it == acc.end()) continue;
      const Acc& a = it->second;
      const double n = static_cast<double>(a.runs);
      GroupRow row{v, g, a.runs, a.gap / n, a.seconds / n, a.iterations / n, std::nullopt};
      if (v != reference) {
        const auto ref = acc.find({reference, g});
        if (ref != acc.end()) {
          row.improvement_percent =
              improvement_percent(ref->second.gap / static_cast<double>(ref->second.runs), row.mean_gap);
        }
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

double ExperimentResult::mean_gap(const std::string& variant) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.variant == variant) {
      sum += r.gap_percent;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("no records for variant " + variant);
  return sum / static_cast<double>(n);
}

std::vector<double> ExperimentResult::paired_gaps(const std::string& variant) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.variant == variant) out.push_back(r.gap_percent);
  }
  return out;
}

std::string ExperimentResult::to_csv(bool include_timing) const {
  std::string out = record_header(include_timing) + '\n';
  for (const auto& r : records) out += alns::to_csv(r, include_timing) + '\n';
  return out;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const BenchmarkData& data) {
  plan.validate();
  std::vector<std::string> missing;
  for (const auto& name : plan.instances) {
    if (!data.bks.contains(name)) missing.push_back(name + " (no best-known cost)");
    if (data.instances.find(name) == data.instances.end()) missing.push_back(name + " (not loaded)");
    if (!data.sets.contains(name)) missing.push_back(name + " (no benchmark set)");
  }
  if (!missing.empty()) {
    std::string msg = "cannot run experiment:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw std::invalid_argument(msg);
  }

  ExperimentResult result;
  for (const auto& v : plan.variants) {
    for (const auto& name : plan.instances) {
      const Instance& inst = data.instances.find(name)->second;
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        RunRecord r;
        r.variant = v.name;
        r.instance = name;
        r.group = group_of(name, inst.size(), data.sets);
        r.seed = experiment_seed(plan.master_seed, name, rep);
        r.budget = plan.budget;
        r.bks = data.bks.at(name);
        r.rep = rep;
        result.records.push_back(std::move(r));
      }
    }
  }

  std::vector<const Variant*> variant_of;
  for (const auto& v : plan.variants) {
    for (std::size_t i = 0; i < plan.instances.size() * static_cast<std::size_t>(plan.repetitions); ++i) {
      variant_of.push_back(&v);
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < result.records.size(); i = next++) {
      RunRecord& r = result.records[i];
      try {
        EngineParams engine = variant_of[i]->engine;
        engine.record_history = false;
        const RunResult run_result =
            run(data.instances.find(r.instance)->second, variant_of[i]->set, r.budget, r.seed, engine);
        r.best_cost = run_result.best_cost;
        r.gap_percent = gap_percent(r.best_cost, r.bks);
        r.iterations = run_result.iterations_done;
        r.seconds = run_result.elapsed_seconds;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int threads = std::clamp(plan.threads > 0 ? plan.threads : hw, 1,
                                 static_cast<int>(std::max<std::size_t>(1, result.records.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return result;
}

AblationResult ablate(const Variant& full, const Variant& baseline, Slot slot, const ExperimentPlan& plan,
                      const BenchmarkData& data) {
  Variant ablated{full.name + "-no-" + std::string(to_string(slot)), substitute_slot(full.set, baseline.set, slot),
                  full.engine};
  ExperimentPlan p = plan;
  p.variants = {full, ablated};
  const ExperimentResult res = run_experiment(p, data);
  AblationResult out;
  out.slot = slot;
  out.gap_full = res.mean_gap(full.name);
  out.gap_ablated = res.mean_gap(ablated.name);
  out.impact = ablation_impact(out.gap_full, out.gap_ablated);
  return out;
}

}  // namespace alns
