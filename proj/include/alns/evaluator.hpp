#pragma once

#include <span>
#include <string>
#include <vector>

#include "alns/engine.hpp"
#include "alns/genome.hpp"

namespace alns {

/// 1 / (1 + mean_gap), gaps as fractions.
double s_gap(double mean_gap);
/// 1 / (1 + sample standard deviation). Needs at least two gaps.
double s_stability(std::span<const double> gaps);
/// 1 / (1 + c * t).
double p_time(double mean_seconds, double c = 1.0);
/// -1 / (1 + population standard deviation of `usage`).
double p_div(std::span<const double> usage);

/// Per-candidate measurements. Gaps are fractions, one per instance (mean
/// over that instance's seeds).
struct EvalMetrics {
  std::vector<std::string> instances;
  std::vector<double> gaps;
  double mean_gap = 0.0;
  double gap_stddev = 0.0;
  double mean_seconds = 0.0;
  /// Standard deviation of per-pool operator usage shares.
  double usage_stddev = 0.0;
  /// Mean per-run variance of the destruction ratio.
  double degree_variance = 0.0;

  nlohmann::json to_json() const;
};

struct QualityWeights {
  double time_scale = 1.0;
};

/// Task-specific combination of the score terms. Larger is better.
double quality(Slot task, const EvalMetrics& metrics, const QualityWeights& weights = {});

std::size_t descriptor_size(Slot task);

/// Behaviour descriptor dimensions for `task` (2D, 3D or 4D).
std::vector<double> behavior_descriptor(Slot task, const EvalMetrics& metrics, const QualityWeights& weights = {});

struct TaskSpec {
  Slot task = Slot::destroy;
  std::vector<std::string> instances;
  std::int64_t iterations = 1000;
  int seeds_per_instance = 2;
  QualityWeights weights;
  EngineParams engine;

  void validate() const;
};

/// Six evolution-set instances spread over the size range.
std::vector<std::string> default_eval_instances();

/// Classic components with the task-specific isolation tweaks: destroy runs
/// against greedy repair only, repair against random destroy only.
ComponentSet fixed_base(Slot task);

struct Evaluation {
  double quality = 0.0;
  std::vector<double> descriptor;
  EvalMetrics metrics;
  /// Non-empty when the candidate could not be evaluated.
  std::string error;
};

class Evaluator {
 public:
  /// `instances` must contain every name in spec.instances; `bks` supplies
  /// the reference costs.
  Evaluator(TaskSpec spec, std::vector<Instance> instances, std::vector<Cost> bks);

  const TaskSpec& spec() const noexcept { return spec_; }

  /// Never throws for a bad genome: failures give quality 0 and an error.
  Evaluation evaluate(const Genome& genome, std::uint64_t seed) const;
  /// Evaluates an explicit component set (the genome already applied).
  Evaluation evaluate_set(const ComponentSet& set, std::uint64_t seed) const;

  /// Seed of the `rep`-th run on instance `name`, shared by all candidates.
  static std::uint64_t run_seed(std::uint64_t seed, const std::string& name, int rep);

 private:
  Evaluation finish(EvalMetrics metrics) const;

  TaskSpec spec_;
  std::vector<Instance> instances_;
  std::vector<Cost> bks_;
};

}  // namespace alns
