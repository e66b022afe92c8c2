#include "alns/evaluator.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "alns/baseline.hpp"

namespace alns {
namespace {

double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double population_stddev(std::span<const double> xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

std::vector<double> shares(const std::vector<std::int64_t>& calls) {
  const double total = static_cast<double>(std::accumulate(calls.begin(), calls.end(), std::int64_t{0}));
  std::vector<double> out;
  for (auto c : calls) out.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
  return out;
}

}  // namespace

double s_gap(double mean_gap) {
  if (mean_gap < -1e-9) throw std::invalid_argument("mean gap must be non-negative");
  return 1.0 / (1.0 + std::max(0.0, mean_gap));
}

double s_stability(std::span<const double> gaps) {
  if (gaps.size() < 2) throw std::invalid_argument("stability needs at least two gaps");
  return 1.0 / (1.0 + sample_stddev(gaps));
}

double p_time(double mean_seconds, double c) {
  if (mean_seconds < 0.0) throw std::invalid_argument("time must be non-negative");
  if (!(c > 0.0)) throw std::invalid_argument("time scale must be positive");
  return 1.0 / (1.0 + c * mean_seconds);
}

double p_div(std::span<const double> usage) {
  if (usage.empty()) throw std::invalid_argument("usage list is empty");
  return -1.0 / (1.0 + population_stddev(usage));
}

nlohmann::json EvalMetrics::to_json() const {
  return {{"instances", instances},       {"gaps", gaps},
          {"mean_gap", mean_gap},         {"gap_stddev", gap_stddev},
          {"mean_seconds", mean_seconds}, {"usage_stddev", usage_stddev},
          {"degree_variance", degree_variance}};
}

double quality(Slot task, const EvalMetrics& m, const QualityWeights& w) {
  const double sg = s_gap(m.mean_gap);
  switch (task) {
    case Slot::destroy:
    case Slot::repair:
      return 0.8 * sg + 0.2 * s_stability(m.gaps);
    case Slot::acceptance:
    case Slot::weight_updater:
    case Slot::degree:
      return sg;
    case Slot::selector: {
      const double div = 1.0 / (1.0 + m.usage_stddev);  // -P_div
      return 0.7 * sg + 0.2 * div + 0.1 * p_time(m.mean_seconds, w.time_scale);
    }
    case Slot::initializer:
      return sg * p_time(m.mean_seconds, w.time_scale);
  }
  throw std::logic_error("unknown task");
}

std::size_t descriptor_size(Slot task) {
  switch (task) {
    case Slot::degree:
    case Slot::initializer: return 3;
    case Slot::selector: return 4;
    default: return 2;
  }
}

std::vector<double> behavior_descriptor(Slot task, const EvalMetrics& m, const QualityWeights& w) {
  std::vector<double> d{s_gap(m.mean_gap), s_stability(m.gaps)};
  switch (task) {
    case Slot::degree: d.push_back(m.degree_variance); break;
    case Slot::initializer: d.push_back(m.mean_seconds); break;
    case Slot::selector:
      d.push_back(1.0 / (1.0 + m.usage_stddev));
      d.push_back(p_time(m.mean_seconds, w.time_scale));
      break;
    default: break;
  }
  return d;
}

void TaskSpec::validate() const {
  if (instances.size() < 2) throw std::invalid_argument("task spec needs at least two instances");
  if (iterations <= 0) throw std::invalid_argument("evaluation budget must be positive");
  if (seeds_per_instance < 1) throw std::invalid_argument("seeds_per_instance must be >= 1");
  if (!(weights.time_scale > 0.0)) throw std::invalid_argument("time scale must be positive");
  engine.validate();
}

std::vector<std::string> default_eval_instances() {
  return {"eil51", "st70", "rat99", "kroA100", "ch150", "kroA200"};
}

ComponentSet fixed_base(Slot task) {
  ComponentSet set = baseline_components();
  if (task == Slot::destroy) set.repair_pool = {InsertionRepair{"greedy", InsertionRule::greedy()}};
  if (task == Slot::repair) set.destroy_pool = {RandomDestroy{}};
  return set;
}

Evaluator::Evaluator(TaskSpec spec, std::vector<Instance> instances, std::vector<Cost> bks)
    : spec_(std::move(spec)), instances_(std::move(instances)), bks_(std::move(bks)) {
  spec_.validate();
  if (instances_.size() != spec_.instances.size() || bks_.size() != instances_.size()) {
    throw std::invalid_argument("evaluator needs one instance and one BKS per listed name");
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i].name() != spec_.instances[i]) {
      throw std::invalid_argument("instance order does not match the task spec");
    }
    if (bks_[i] <= 0) throw std::invalid_argument("BKS must be positive for " + instances_[i].name());
  }
}

std::uint64_t Evaluator::run_seed(std::uint64_t seed, const std::string& name, int rep) {
  return derive_seed(derive_seed(seed, name), static_cast<std::uint64_t>(rep));
}

Evaluation Evaluator::evaluate(const Genome& genome, std::uint64_t seed) const {
  try {
    if (genome.task != spec_.task) throw std::invalid_argument("genome task does not match the evaluator");
    ComponentSet set = fixed_base(spec_.task);
    apply_genome(set, genome);
    return evaluate_set(set, seed);
  } catch (const std::exception& e) {
    Evaluation ev;
    ev.error = e.what();
    ev.descriptor.assign(descriptor_size(spec_.task), 0.0);
    return ev;
  }
}

Evaluation Evaluator::evaluate_set(const ComponentSet& set, std::uint64_t seed) const {
  using Clock = std::chrono::steady_clock;
  EvalMetrics m;
  m.instances = spec_.instances;
  double seconds = 0.0;
  double usage_sd = 0.0;
  double degree_var = 0.0;
  int runs = 0;
  EngineParams engine = spec_.engine;
  engine.record_history = false;

  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const Instance& inst = instances_[i];
    double gap_sum = 0.0;
    for (int rep = 0; rep < spec_.seeds_per_instance; ++rep) {
      const std::uint64_t s = run_seed(seed, inst.name(), rep);
      Cost cost = 0;
      if (spec_.task == Slot::initializer) {
        // the construction is scored on its own, without the search loop
        Rng rng = Rng(s).fork("initializer");
        const auto t0 = Clock::now();
        const Tour tour = set.initializer->build(inst, rng);
        seconds += std::chrono::duration<double>(Clock::now() - t0).count();
        if (!is_valid_permutation(tour.order, inst.size()) || tour_cost(inst, tour.order) != tour.cost) {
          throw ContractViolation("initializer returned an invalid tour");
        }
        cost = tour.cost;
      } else {
        const RunResult r = run(inst, set, Budget::iterations(spec_.iterations), s, engine);
        cost = r.best_cost;
        seconds += r.elapsed_seconds;
        const auto ds = shares(r.stats.destroy_calls);
        const auto rs = shares(r.stats.repair_calls);
        usage_sd += 0.5 * (population_stddev(ds) + population_stddev(rs));
        degree_var += r.stats.degree_variance;
      }
      gap_sum += static_cast<double>(cost - bks_[i]) / static_cast<double>(bks_[i]);
      ++runs;
    }
    m.gaps.push_back(gap_sum / spec_.seeds_per_instance);
  }
  m.mean_gap = mean_of(m.gaps);
  m.gap_stddev = sample_stddev(m.gaps);
  m.mean_seconds = seconds / runs;
  m.usage_stddev = usage_sd / runs;
  m.degree_variance = degree_var / runs;
  return finish(std::move(m));
}

Evaluation Evaluator::finish(EvalMetrics metrics) const {
  Evaluation ev;
  ev.quality = quality(spec_.task, metrics, spec_.weights);
  ev.descriptor = behavior_descriptor(spec_.task, metrics, spec_.weights);
  ev.metrics = std::move(metrics);
  return ev;
}

}  // namespace alns
