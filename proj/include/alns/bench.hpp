#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alns/engine.hpp"

namespace alns {

struct Variant {
  std::string name;
  ComponentSet set;
  EngineParams engine;
};

struct BaselineParams;
struct EvolvedParams;

/// "baseline" or "evolved".
Variant named_variant(const std::string& name);
Variant named_variant(const std::string& name, const BaselineParams& baseline, const EvolvedParams& evolved);

enum class BudgetSetting { iters_1000, time_60s, iters_25000 };

Budget budget_for(BudgetSetting setting);
/// Accepts "iters1000", "time60", "iters25000" and the underscore spellings.
BudgetSetting parse_budget_setting(std::string_view text);

enum class Membership { evo, test };
enum class Group { small_evo, medium_evo, med_small_test, large_test };

std::string_view to_string(Group group);

/// Instance names per membership, read from a file with lines "evo: a b c".
class BenchmarkSets {
 public:
  static BenchmarkSets parse(std::string_view text);
  static BenchmarkSets load(const std::filesystem::path& path);

  /// Throws std::out_of_range for unknown names.
  Membership membership(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names(Membership m) const;

 private:
  std::map<std::string, Membership, std::less<>> members_;
};

/// Node-count split: evo N<=105 small, else medium (up to 300); test N<=300
/// med-small, else large.
Group group_of(std::size_t n, Membership membership);
Group group_of(std::string_view name, std::size_t n, const BenchmarkSets& sets);

struct ExperimentPlan {
  std::vector<Variant> variants;
  Budget budget = Budget::iterations(1000);
  std::vector<std::string> instances;
  int repetitions = 10;
  std::uint64_t master_seed = 42;
  /// Worker threads; 0 means hardware concurrency.
  int threads = 0;

  void validate() const;
};

/// Seed of repetition `rep` on `instance`. Independent of the variant so
/// every variant sees the same seeds.
std::uint64_t experiment_seed(std::uint64_t master, const std::string& instance, int rep);

struct RunRecord {
  std::string variant;
  std::string instance;
  Group group = Group::small_evo;
  std::uint64_t seed = 0;
  Budget budget;
  Cost best_cost = 0;
  Cost bks = 0;
  double gap_percent = 0.0;
  std::int64_t iterations = 0;
  double seconds = 0.0;
  int rep = 0;
};

std::string record_header(bool include_timing = true);
std::string to_csv(const RunRecord& r, bool include_timing = true);

struct GroupRow {
  std::string variant;
  Group group = Group::small_evo;
  std::size_t runs = 0;
  double mean_gap = 0.0;
  double mean_seconds = 0.0;
  double mean_iterations = 0.0;
  /// Relative to the reference variant; empty for the reference itself.
  std::optional<double> improvement_percent;
};

struct GroupedReport {
  std::vector<GroupRow> rows;
  std::string reference;

  std::string to_csv(bool include_timing = true) const;
};

/// (base - variant) / base * 100 on mean gaps.
double improvement_percent(double base_gap, double variant_gap);
/// (gap_full - gap_ablated) / gap_full * 100; negative when the ablation hurts.
double ablation_impact(double gap_full, double gap_ablated);

/// Instances and reference costs used by the runner.
struct BenchmarkData {
  std::map<std::string, Instance, std::less<>> instances;
  BksTable bks;
  BenchmarkSets sets;

  /// Loads `<dir>/<name>.tsp` for every requested name.
  static BenchmarkData load(const std::filesystem::path& tsplib_dir, const std::filesystem::path& bks_file,
                            const std::filesystem::path& sets_file, const std::vector<std::string>& names);
};

struct ExperimentResult {
  /// Ordered by variant, instance, rep regardless of completion order.
  std::vector<RunRecord> records;

  GroupedReport report(const std::string& reference) const;
  /// Mean gap of `variant` over all its records.
  double mean_gap(const std::string& variant) const;
  /// Per-(instance, rep) gaps of `variant` in plan order, for paired tests.
  std::vector<double> paired_gaps(const std::string& variant) const;
  std::string to_csv(bool include_timing = true) const;
};

/// Throws std::invalid_argument listing every instance without a reference
/// cost or instance data before any run starts.
ExperimentResult run_experiment(const ExperimentPlan& plan, const BenchmarkData& data);

struct AblationResult {
  Slot slot = Slot::destroy;
  double gap_full = 0.0;
  double gap_ablated = 0.0;
  double impact = 0.0;
};

/// Replaces `slot` of the full variant with the baseline's component, keeping
/// the full variant's engine parameters, and runs both under `plan` (whose
/// own variant list is ignored).
AblationResult ablate(const Variant& full, const Variant& baseline, Slot slot, const ExperimentPlan& plan,
                      const BenchmarkData& data);

}  // namespace alns
