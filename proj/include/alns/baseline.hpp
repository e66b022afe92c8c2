#pragma once

#include <array>
#include <span>

#include "alns/components.hpp"
#include "alns/engine.hpp"
#include "alns/insertion.hpp"

namespace alns {

/// Hyperparameters of the classic (expert-designed) ALNS.
struct BaselineParams {
  double initial_temperature = 9000.0;
  double cooling_rate = 0.9991;
  double reaction_factor = 0.45;
  double destruction_ratio = 0.5;
  double shaw_randomization = 6.0;
  double worst_randomization = 6.0;
  /// Scores for (new global best, improved current, accepted).
  std::array<double, 3> scores{33.0, 9.0, 13.0};
  std::int64_t segment_length = 100;

  void validate() const;
  EngineParams engine() const { return EngineParams{initial_temperature, cooling_rate}; }
};

// Destroy operators. All require 1 <= k <= n-2, return exactly k unrouted
// nodes and keep the survivors in tour order.

PartialSolution random_destroy(const Tour& tour, std::size_t k, Rng& rng);

/// Randomised worst removal: candidates ranked by saving
/// d(prev,v) + d(v,next) - d(prev,next) (largest first, recomputed after each
/// removal); the removed rank is floor(|candidates| * u^p).
PartialSolution worst_destroy(const Tour& tour, std::size_t k, const Instance& instance, double p, Rng& rng);

/// Shaw removal with distance relatedness: from a uniformly chosen seed,
/// repeatedly picks an already removed node r and removes the remaining node
/// at rank floor(|candidates| * u^p) of increasing d(r, v) / max distance.
PartialSolution shaw_destroy(const Tour& tour, std::size_t k, const Instance& instance, double p, Rng& rng);

Tour greedy_repair(PartialSolution partial, const Instance& instance);
Tour regret_repair(PartialSolution partial, const Instance& instance, int k_regret);

/// Nearest-neighbour tour from `start`; ties go to the lowest index.
Tour nearest_neighbor_tour(const Instance& instance, Node start);
/// Nearest-neighbour tour from a uniformly random start.
Tour nn_initial(const Instance& instance, Rng& rng);
Tour random_permutation_tour(const Instance& instance, Rng& rng);

/// Index i with probability w_i / sum(w). Throws on a non-positive weight.
std::size_t roulette_select(std::span<const double> weights, Rng& rng);

/// Discrete score of an iteration outcome under `scores`.
double classic_score(const IterationRecord& record, const std::array<double, 3>& scores);

/// Accumulates the score of `op` for this iteration; when `segment_done`,
/// every operator used in the segment gets w <- (1-r) w + r * avg score and
/// the accumulators reset. Returns the score credited.
double classic_weight_update(OperatorWeights& weights, std::size_t op, const IterationRecord& record,
                             const std::array<double, 3>& scores, double reaction_factor, bool segment_done);

/// Simulated-annealing acceptance: always for delta <= 0, otherwise with
/// probability exp(-delta / T). Draws from `rng` only when delta > 0.
bool sa_accept(Cost delta, double temperature, Rng& rng);

/// k = clamp(round(ratio * n), 1, n - 2).
std::size_t fixed_degree(std::size_t n, double ratio);

// Component wrappers.

class RandomDestroy final : public DestroyOperator {
 public:
  std::string name() const override { return "random"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance&, Rng& rng) const override {
    return random_destroy(tour, k, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<RandomDestroy>(*this); }
};

class WorstDestroy final : public DestroyOperator {
 public:
  explicit WorstDestroy(double p = 6.0) : p_(p) {}
  std::string name() const override { return "worst"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng) const override {
    return worst_destroy(tour, k, instance, p_, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<WorstDestroy>(*this); }

 private:
  double p_;
};

class ShawDestroy final : public DestroyOperator {
 public:
  explicit ShawDestroy(double p = 6.0) : p_(p) {}
  std::string name() const override { return "shaw"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng) const override {
    return shaw_destroy(tour, k, instance, p_, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<ShawDestroy>(*this); }

 private:
  double p_;
};

/// Repair driven by an InsertionRule (greedy, regret-k or blended scores).
class InsertionRepair final : public RepairOperator {
 public:
  InsertionRepair(std::string name, InsertionRule rule) : name_(std::move(name)), rule_(rule) {}
  std::string name() const override { return name_; }
  Tour repair(PartialSolution partial, const Instance& instance, Rng&) const override {
    return insertion_repair(std::move(partial), instance, rule_);
  }
  std::unique_ptr<RepairOperator> clone() const override { return std::make_unique<InsertionRepair>(*this); }
  const InsertionRule& rule() const noexcept { return rule_; }

 private:
  std::string name_;
  InsertionRule rule_;
};

class NearestNeighborInit final : public InitialSolution {
 public:
  std::string name() const override { return "nearest_neighbor"; }
  Tour build(const Instance& instance, Rng& rng) const override { return nn_initial(instance, rng); }
  std::unique_ptr<InitialSolution> clone() const override { return std::make_unique<NearestNeighborInit>(*this); }
};

class RandomPermutationInit final : public InitialSolution {
 public:
  std::string name() const override { return "random_permutation"; }
  Tour build(const Instance& instance, Rng& rng) const override { return random_permutation_tour(instance, rng); }
  std::unique_ptr<InitialSolution> clone() const override { return std::make_unique<RandomPermutationInit>(*this); }
};

class RouletteSelector final : public OperatorSelector {
 public:
  std::string name() const override { return "roulette"; }
  OperatorPair select(const SearchState& state, Rng& rng) override {
    const std::size_t d = roulette_select(state.destroy.weights.weights, rng);
    const std::size_t r = roulette_select(state.repair.weights.weights, rng);
    return {d, r};
  }
  std::unique_ptr<OperatorSelector> clone() const override { return std::make_unique<RouletteSelector>(*this); }
};

/// Discrete scores with segment-wise exponential smoothing. The reward
/// passed on to the selector is the score normalised by the top tier.
class ClassicWeightUpdater final : public WeightUpdater {
 public:
  ClassicWeightUpdater(std::array<double, 3> scores, double reaction_factor, std::int64_t segment_length);
  std::string name() const override { return "classic"; }
  double update(const IterationRecord& record, SearchState& state) override;
  std::unique_ptr<WeightUpdater> clone() const override { return std::make_unique<ClassicWeightUpdater>(*this); }

 private:
  std::array<double, 3> scores_;
  double reaction_factor_;
  std::int64_t segment_length_;
};

class SimulatedAnnealing final : public AcceptanceCriterion {
 public:
  std::string name() const override { return "sa"; }
  bool accept(Cost delta, const SearchState& state, Rng& rng) override {
    return sa_accept(delta, state.temperature, rng);
  }
  std::unique_ptr<AcceptanceCriterion> clone() const override { return std::make_unique<SimulatedAnnealing>(*this); }
};

class FixedDegree final : public DegreeController {
 public:
  explicit FixedDegree(double ratio) : ratio_(ratio) {}
  std::string name() const override { return "fixed"; }
  std::size_t degree(std::size_t n, const SearchState&, Rng&) override { return fixed_degree(n, ratio_); }
  std::unique_ptr<DegreeController> clone() const override { return std::make_unique<FixedDegree>(*this); }

 private:
  double ratio_;
};

/// Ratio drawn uniformly from [lo, hi] every iteration.
class UniformDegree final : public DegreeController {
 public:
  UniformDegree(double lo, double hi);
  std::string name() const override { return "uniform"; }
  std::size_t degree(std::size_t n, const SearchState&, Rng& rng) override;
  std::unique_ptr<DegreeController> clone() const override { return std::make_unique<UniformDegree>(*this); }

 private:
  double lo_;
  double hi_;
};

/// The classic component set: {random, worst, shaw} x {greedy, regret-2,
/// regret-3}, nearest-neighbour start, roulette selection, discrete-score
/// weights, simulated annealing and a fixed destruction ratio.
ComponentSet baseline_components(const BaselineParams& params = {});

}  // namespace alns
