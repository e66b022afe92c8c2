#pragma once

#include <deque>
#include <vector>

#include "alns/baseline.hpp"

namespace alns {

struct BanditParams {
  double c_ucb = 0.5;
  /// Score factor applied to operators among the last three selections.
  double rho = 0.5;
  double momentum_decay = 0.8;
  double prior = 1.0;
};

/// Beta-style pseudo-counts, momentum and recency for one operator pool.
struct BanditPool {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> momentum;
  std::vector<double> last_reward;
  std::vector<std::int64_t> pulls;
  std::int64_t total = 0;
  std::deque<std::size_t> recent;

  BanditPool() = default;
  BanditPool(std::size_t n, double prior);
  std::size_t size() const noexcept { return a.size(); }
};

struct BanditState {
  BanditParams params;
  BanditPool destroy;
  BanditPool repair;

  BanditState() = default;
  BanditState(std::size_t n_destroy, std::size_t n_repair, const BanditParams& p);
};

/// score_i = a/(a+b) + m + c_ucb * sqrt(ln(total+1) / (pulls+1)), damped to
/// rho * score for operators in the recent queue.
std::vector<double> bandit_scores(const BanditPool& pool, const BanditParams& params);
/// Softmax over bandit_scores.
std::vector<double> bandit_probabilities(const BanditPool& pool, const BanditParams& params);
/// Samples one index and records it as a recent selection.
std::size_t bandit_select(BanditPool& pool, const BanditParams& params, Rng& rng);
OperatorPair bandit_select(BanditState& state, Rng& rng);
/// Pseudo-count and momentum update for one pulled arm.
void bandit_feedback(BanditPool& pool, std::size_t arm, double reward, const BanditParams& params);

struct RiskAdjustParams {
  double reward_best = 1.0;
  double reward_improve = 0.5;
  double lambda_min = 0.1;
  double lambda_max = 1.0;
  double eta = 0.6;
  /// Floor of the smoothing target so weights stay positive.
  double weight_floor = 0.01;

  void validate() const;
};

/// lambda(T) = lambda_min + (lambda_max - lambda_min) * (1 - T/T0).
double risk_lambda(double temperature, double initial_temperature, const RiskAdjustParams& params);

/// r_best on a new best, r_improve on an improvement, -lambda(T) on any
/// worsening proposal (accepted or not), 0 otherwise.
double risk_reward(const IterationRecord& record, double temperature, double initial_temperature,
                   const RiskAdjustParams& params);

/// w_op <- (1-eta) w_op + eta * max(floor, mean(w) + reward).
void risk_weight_update(OperatorWeights& weights, std::size_t op, double reward, const RiskAdjustParams& params);

/// Full update for one iteration: reward, both pools' weights and the bandit
/// statistics of the pulled pair. Returns the reward.
double risk_adjusted_update(BanditState& bandit, OperatorWeights& destroy_weights, OperatorWeights& repair_weights,
                            const IterationRecord& record, double temperature, double initial_temperature,
                            const RiskAdjustParams& params);

struct ToleranceParams {
  double kappa = 0.3;
  std::int64_t window = 50;

  void validate() const;
};

/// Accepts outright when delta <= t_a, otherwise with probability
/// exp(-(delta - t_a) / T). Draws from `rng` only in the second case.
bool tolerance_accept(Cost delta, double temperature, double threshold, Rng& rng);

/// Tracks |delta| of the last W worsening proposals.
class ToleranceWindow {
 public:
  explicit ToleranceWindow(std::int64_t window) : window_(window) {}
  /// kappa * mean(window) * T/T0; 0 while the window is empty.
  double threshold(double kappa, double temperature, double initial_temperature) const;
  void observe(Cost delta);

 private:
  std::int64_t window_;
  std::deque<Cost> deltas_;
  double sum_ = 0.0;
};

enum class HybridVariant { a, b };

/// A: 1.5 * regret-2 - 0.25 * c1.  B: regret-3 - 0.15 * c1.
InsertionRule hybrid_rule(HybridVariant variant);
Tour hybrid_regret_repair(PartialSolution partial, const Instance& instance, HybridVariant variant);

/// Removes the arc of k consecutive tour positions starting at a random one.
PartialSolution string_destroy(const Tour& tour, std::size_t k, Rng& rng);

/// Repeatedly draws a tour edge with probability proportional to
/// (length / longest)^exponent and removes its endpoints. When one slot is
/// left and both endpoints are present, one of them is chosen uniformly.
PartialSolution long_edge_destroy(const Tour& tour, std::size_t k, const Instance& instance, double exponent,
                                  Rng& rng);

/// Shaw removal with deterministic nearest choice.
PartialSolution cluster_destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng);

struct DegreeControlParams {
  double d_min = 0.08;
  double d_max = 0.45;
  std::int64_t stagnation_threshold = 50;
  double stagnation_boost = 0.1;
  double jitter_lo = 0.8;
  double jitter_hi = 1.2;

  void validate() const;
};

/// Expected destruction ratio before jitter.
double adaptive_ratio(double progress, std::int64_t stagnation, const DegreeControlParams& params);
std::size_t adaptive_degree(std::size_t n, double progress, std::int64_t stagnation,
                            const DegreeControlParams& params, Rng& rng);

/// Best nearest-neighbour tour over min(starts, n) distinct random starts.
Tour evolved_initial(const Instance& instance, std::size_t starts, Rng& rng);

class StringDestroy final : public DestroyOperator {
 public:
  std::string name() const override { return "string"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance&, Rng& rng) const override {
    return string_destroy(tour, k, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<StringDestroy>(*this); }
};

class LongEdgeDestroy final : public DestroyOperator {
 public:
  explicit LongEdgeDestroy(double exponent = 4.0) : exponent_(exponent) {}
  std::string name() const override { return "long_edge"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng) const override {
    return long_edge_destroy(tour, k, instance, exponent_, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<LongEdgeDestroy>(*this); }

 private:
  double exponent_;
};

class ClusterDestroy final : public DestroyOperator {
 public:
  std::string name() const override { return "cluster"; }
  PartialSolution destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng) const override {
    return cluster_destroy(tour, k, instance, rng);
  }
  std::unique_ptr<DestroyOperator> clone() const override { return std::make_unique<ClusterDestroy>(*this); }
};

class MultiStartInit final : public InitialSolution {
 public:
  explicit MultiStartInit(std::size_t starts = 8) : starts_(starts) {}
  std::string name() const override { return "multi_start_nn"; }
  Tour build(const Instance& instance, Rng& rng) const override { return evolved_initial(instance, starts_, rng); }
  std::unique_ptr<InitialSolution> clone() const override { return std::make_unique<MultiStartInit>(*this); }

 private:
  std::size_t starts_;
};

class BanditSelector final : public OperatorSelector {
 public:
  explicit BanditSelector(const BanditParams& params = {}) : params_(params) {}
  std::string name() const override { return "bandit"; }
  void reset(std::size_t destroy_count, std::size_t repair_count) override {
    state_ = BanditState(destroy_count, repair_count, params_);
  }
  OperatorPair select(const SearchState&, Rng& rng) override { return bandit_select(state_, rng); }
  void feedback(const IterationRecord& record, double reward) override;
  std::unique_ptr<OperatorSelector> clone() const override { return std::make_unique<BanditSelector>(*this); }
  const BanditState& state() const noexcept { return state_; }

 private:
  BanditParams params_;
  BanditState state_;
};

class RiskAdjustedUpdater final : public WeightUpdater {
 public:
  explicit RiskAdjustedUpdater(const RiskAdjustParams& params = {}) : params_(params) { params_.validate(); }
  std::string name() const override { return "risk_adjusted"; }
  double update(const IterationRecord& record, SearchState& state) override;
  std::unique_ptr<WeightUpdater> clone() const override { return std::make_unique<RiskAdjustedUpdater>(*this); }

 private:
  RiskAdjustParams params_;
};

class ToleranceAcceptance final : public AcceptanceCriterion {
 public:
  explicit ToleranceAcceptance(const ToleranceParams& params = {}) : params_(params), window_(params.window) {
    params_.validate();
  }
  std::string name() const override { return "tolerance"; }
  bool accept(Cost delta, const SearchState& state, Rng& rng) override;
  std::unique_ptr<AcceptanceCriterion> clone() const override { return std::make_unique<ToleranceAcceptance>(*this); }

 private:
  ToleranceParams params_;
  ToleranceWindow window_;
};

class AdaptiveDegree final : public DegreeController {
 public:
  explicit AdaptiveDegree(const DegreeControlParams& params = {}) : params_(params) { params_.validate(); }
  std::string name() const override { return "adaptive"; }
  std::size_t degree(std::size_t n, const SearchState& state, Rng& rng) override {
    return adaptive_degree(n, state.progress, state.stagnation, params_, rng);
  }
  std::unique_ptr<DegreeController> clone() const override { return std::make_unique<AdaptiveDegree>(*this); }

 private:
  DegreeControlParams params_;
};

struct EvolvedParams {
  double initial_temperature = 10000.0;
  double cooling_rate = 0.9995;
  BanditParams bandit;
  RiskAdjustParams risk;
  ToleranceParams tolerance;
  DegreeControlParams degree;
  double long_edge_exponent = 4.0;
  std::size_t init_starts = 8;

  void validate() const;
  EngineParams engine() const { return EngineParams{initial_temperature, cooling_rate}; }
};

/// {string, long_edge, cluster} x {hybrid A, hybrid B, regret-2}, multi-start
/// nearest-neighbour start, bandit selection, risk-adjusted weights,
/// tolerance acceptance and adaptive destruction degree.
ComponentSet evolved_components(const EvolvedParams& params = {});

}  // namespace alns
