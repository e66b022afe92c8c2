#include "alns/evolved.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace alns {
namespace {

// Roulette that tolerates zero weights; at least one weight must be positive.
std::size_t roulette_select_nonnegative(const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double x = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    x -= weights[i];
    if (x < 0.0) return i;
  }
  return last;
}

}  // namespace

BanditPool::BanditPool(std::size_t n, double prior)
    : a(n, prior), b(n, prior), momentum(n, 0.0), last_reward(n, 0.0), pulls(n, 0) {}

BanditState::BanditState(std::size_t n_destroy, std::size_t n_repair, const BanditParams& p)
    : params(p), destroy(n_destroy, p.prior), repair(n_repair, p.prior) {}

std::vector<double> bandit_scores(const BanditPool& pool, const BanditParams& params) {
  if (pool.size() == 0) throw std::invalid_argument("bandit over an empty pool");
  std::vector<double> scores(pool.size());
  const double log_total = std::log(static_cast<double>(pool.total) + 1.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double s = pool.a[i] / (pool.a[i] + pool.b[i]) + pool.momentum[i] +
               params.c_ucb * std::sqrt(log_total / (static_cast<double>(pool.pulls[i]) + 1.0));
    if (std::find(pool.recent.begin(), pool.recent.end(), i) != pool.recent.end()) {
      // same as rho * s for positive scores, and still a penalty for negative ones
      s -= (1.0 - params.rho) * std::abs(s);
    }
    scores[i] = s;
  }
  return scores;
}

std::vector<double> bandit_probabilities(const BanditPool& pool, const BanditParams& params) {
  std::vector<double> p = bandit_scores(pool, params);
  const double top = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& x : p) {
    x = std::exp(x - top);
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

std::size_t bandit_select(BanditPool& pool, const BanditParams& params, Rng& rng) {
  const auto probs = bandit_probabilities(pool, params);
  double x = rng.uniform();
  std::size_t chosen = probs.size() - 1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    x -= probs[i];
    if (x < 0.0) {
      chosen = i;
      break;
    }
  }
  pool.recent.push_back(chosen);
  while (pool.recent.size() > 3) pool.recent.pop_front();
  return chosen;
}

OperatorPair bandit_select(BanditState& state, Rng& rng) {
  const std::size_t d = bandit_select(state.destroy, state.params, rng);
  const std::size_t r = bandit_select(state.repair, state.params, rng);
  return {d, r};
}

void bandit_feedback(BanditPool& pool, std::size_t arm, double reward, const BanditParams& params) {
  if (arm >= pool.size()) throw std::out_of_range("bandit arm out of range");
  if (reward > 0.0) pool.a[arm] += 1.0;
  if (reward < 0.0) pool.b[arm] += 1.0;
  const double change = reward - pool.last_reward[arm];
  pool.momentum[arm] = params.momentum_decay * pool.momentum[arm] + (1.0 - params.momentum_decay) * change;
  pool.last_reward[arm] = reward;
  ++pool.pulls[arm];
  ++pool.total;
}

void RiskAdjustParams::validate() const {
  if (!(reward_best > 0.0 && reward_improve > 0.0)) throw std::invalid_argument("reward tiers must be positive");
  if (!(lambda_min >= 0.0 && lambda_min <= lambda_max)) {
    throw std::invalid_argument("need 0 <= lambda_min <= lambda_max");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (!(weight_floor > 0.0)) throw std::invalid_argument("weight_floor must be positive");
}

double risk_lambda(double temperature, double initial_temperature, const RiskAdjustParams& params) {
  const double frac = std::clamp(temperature / initial_temperature, 0.0, 1.0);
  return params.lambda_min + (params.lambda_max - params.lambda_min) * (1.0 - frac);
}

double risk_reward(const IterationRecord& record, double temperature, double initial_temperature,
                   const RiskAdjustParams& params) {
  if (record.new_best) return params.reward_best;
  if (record.delta < 0) return params.reward_improve;
  if (record.delta > 0) return -risk_lambda(temperature, initial_temperature, params);
  return 0.0;
}

void risk_weight_update(OperatorWeights& weights, std::size_t op, double reward, const RiskAdjustParams& params) {
  if (op >= weights.size()) throw std::out_of_range("operator index out of range");
  const double mean = std::accumulate(weights.weights.begin(), weights.weights.end(), 0.0) /
                      static_cast<double>(weights.size());
  double& w = weights.weights[op];
  w = (1.0 - params.eta) * w + params.eta * std::max(params.weight_floor, mean + reward);
  ++weights.usage[op];
}

double risk_adjusted_update(BanditState& bandit, OperatorWeights& destroy_weights, OperatorWeights& repair_weights,
                            const IterationRecord& record, double temperature, double initial_temperature,
                            const RiskAdjustParams& params) {
  const double reward = risk_reward(record, temperature, initial_temperature, params);
  risk_weight_update(destroy_weights, record.destroy_index, reward, params);
  risk_weight_update(repair_weights, record.repair_index, reward, params);
  bandit_feedback(bandit.destroy, record.destroy_index, reward, bandit.params);
  bandit_feedback(bandit.repair, record.repair_index, reward, bandit.params);
  return reward;
}

void ToleranceParams::validate() const {
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

bool tolerance_accept(Cost delta, double temperature, double threshold, Rng& rng) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (static_cast<double>(delta) <= threshold) return true;
  return rng.uniform() < std::exp(-(static_cast<double>(delta) - threshold) / temperature);
}

double ToleranceWindow::threshold(double kappa, double temperature, double initial_temperature) const {
  if (deltas_.empty()) return 0.0;
  const double mean = sum_ / static_cast<double>(deltas_.size());
  return kappa * mean * (temperature / initial_temperature);
}

void ToleranceWindow::observe(Cost delta) {
  if (delta <= 0) return;
  deltas_.push_back(delta);
  sum_ += static_cast<double>(delta);
  while (static_cast<std::int64_t>(deltas_.size()) > window_) {
    sum_ -= static_cast<double>(deltas_.front());
    deltas_.pop_front();
  }
}

InsertionRule hybrid_rule(HybridVariant variant) {
  return variant == HybridVariant::a ? InsertionRule{2, 1.5, 0.25} : InsertionRule{3, 1.0, 0.15};
}

Tour hybrid_regret_repair(PartialSolution partial, const Instance& instance, HybridVariant variant) {
  return insertion_repair(std::move(partial), instance, hybrid_rule(variant));
}

PartialSolution string_destroy(const Tour& tour, std::size_t k, Rng& rng) {
  const std::size_t n = tour.order.size();
  check_removal_size(n, k);
  const std::size_t start = static_cast<std::size_t>(rng.below(n));
  PartialSolution out;
  out.unrouted.reserve(k);
  std::vector<char> removed(n, 0);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = (start + j) % n;
    removed[i] = 1;
    out.unrouted.push_back(tour.order[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.fragment.push_back(tour.order[i]);
  }
  return out;
}

PartialSolution long_edge_destroy(const Tour& tour, std::size_t k, const Instance& instance, double exponent,
                                  Rng& rng) {
  const std::size_t n = tour.order.size();
  check_removal_size(n, k);
  // edge i joins positions i and i+1
  std::vector<double> weight(n);
  Cost longest = 0;
  for (std::size_t i = 0; i < n; ++i) longest = std::max(longest, instance.dist(tour.order[i], tour.order[(i + 1) % n]));
  for (std::size_t i = 0; i < n; ++i) {
    const double len = static_cast<double>(instance.dist(tour.order[i], tour.order[(i + 1) % n]));
    weight[i] = longest > 0 ? std::max(1e-12, std::pow(len / static_cast<double>(longest), exponent)) : 1.0;
  }

  std::vector<char> removed(n, 0);
  PartialSolution out;
  out.unrouted.reserve(k);
  const auto remove_at = [&](std::size_t i) {
    removed[i] = 1;
    out.unrouted.push_back(tour.order[i]);
    // an edge whose endpoints are both gone can no longer contribute
    const std::size_t left = (i + n - 1) % n;
    if (removed[left]) weight[left] = 0.0;
    if (removed[(i + 1) % n]) weight[i] = 0.0;
  };

  while (out.unrouted.size() < k) {
    const std::size_t e = roulette_select_nonnegative(weight, rng);
    const std::size_t u = e, v = (e + 1) % n;
    const bool has_u = !removed[u], has_v = !removed[v];
    if (has_u && has_v && out.unrouted.size() + 1 == k) {
      remove_at(rng.below(2) == 0 ? u : v);
    } else {
      if (has_u) remove_at(u);
      if (has_v) remove_at(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.fragment.push_back(tour.order[i]);
  }
  return out;
}

PartialSolution cluster_destroy(const Tour& tour, std::size_t k, const Instance& instance, Rng& rng) {
  return shaw_destroy(tour, k, instance, std::numeric_limits<double>::infinity(), rng);
}

void DegreeControlParams::validate() const {
  if (!(d_min > 0.0 && d_min <= d_max && d_max < 1.0)) throw std::invalid_argument("need 0 < d_min <= d_max < 1");
  if (stagnation_threshold < 0) throw std::invalid_argument("stagnation_threshold must be >= 0");
  if (!(stagnation_boost >= 0.0)) throw std::invalid_argument("stagnation_boost must be >= 0");
  if (!(jitter_lo > 0.0 && jitter_lo <= jitter_hi)) throw std::invalid_argument("invalid jitter range");
}

double adaptive_ratio(double progress, std::int64_t stagnation, const DegreeControlParams& params) {
  double ratio = params.d_max - (params.d_max - params.d_min) * std::clamp(progress, 0.0, 1.0);
  if (stagnation > params.stagnation_threshold) ratio = std::min(params.d_max, ratio + params.stagnation_boost);
  return ratio;
}

std::size_t adaptive_degree(std::size_t n, double progress, std::int64_t stagnation,
                            const DegreeControlParams& params, Rng& rng) {
  if (n < 3) throw std::invalid_argument("degree needs at least 3 nodes");
  const double ratio = adaptive_ratio(progress, stagnation, params);
  const double u = rng.uniform(params.jitter_lo, params.jitter_hi);
  const double raw = std::round(ratio * static_cast<double>(n) * u);
  return static_cast<std::size_t>(std::clamp(raw, 1.0, static_cast<double>(n - 2)));
}

Tour evolved_initial(const Instance& instance, std::size_t starts, Rng& rng) {
  const std::size_t n = instance.size();
  const std::size_t m = std::clamp<std::size_t>(starts, 1, n);
  std::vector<Node> nodes(n);
  std::iota(nodes.begin(), nodes.end(), Node{0});
  Tour best;
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(nodes[i], nodes[i + static_cast<std::size_t>(rng.below(n - i))]);
    Tour t = nearest_neighbor_tour(instance, nodes[i]);
    if (i == 0 || t.cost < best.cost) best = std::move(t);
  }
  return best;
}

void BanditSelector::feedback(const IterationRecord& record, double reward) {
  bandit_feedback(state_.destroy, record.destroy_index, reward, params_);
  bandit_feedback(state_.repair, record.repair_index, reward, params_);
}

double RiskAdjustedUpdater::update(const IterationRecord& record, SearchState& state) {
  const double reward = risk_reward(record, state.temperature, state.initial_temperature, params_);
  risk_weight_update(state.destroy.weights, record.destroy_index, reward, params_);
  risk_weight_update(state.repair.weights, record.repair_index, reward, params_);
  return reward;
}

bool ToleranceAcceptance::accept(Cost delta, const SearchState& state, Rng& rng) {
  const double t_a = window_.threshold(params_.kappa, state.temperature, state.initial_temperature);
  window_.observe(delta);
  return tolerance_accept(delta, state.temperature, t_a, rng);
}

void EvolvedParams::validate() const {
  EngineParams{initial_temperature, cooling_rate}.validate();
  if (!(bandit.rho > 0.0 && bandit.rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  if (!(bandit.c_ucb >= 0.0)) throw std::invalid_argument("c_ucb must be >= 0");
  if (!(bandit.momentum_decay >= 0.0 && bandit.momentum_decay < 1.0)) {
    throw std::invalid_argument("momentum_decay must lie in [0, 1)");
  }
  if (!(bandit.prior >= 1.0)) throw std::invalid_argument("bandit prior must be >= 1");
  risk.validate();
  tolerance.validate();
  degree.validate();
  if (!(long_edge_exponent >= 0.0)) throw std::invalid_argument("long_edge_exponent must be >= 0");
  if (init_starts < 1) throw std::invalid_argument("init_starts must be >= 1");
}

ComponentSet evolved_components(const EvolvedParams& params) {
  params.validate();
  ComponentSet set;
  set.destroy_pool = {StringDestroy{}, LongEdgeDestroy{params.long_edge_exponent}, ClusterDestroy{}};
  set.repair_pool = {InsertionRepair{"hybrid_a", hybrid_rule(HybridVariant::a)},
                     InsertionRepair{"hybrid_b", hybrid_rule(HybridVariant::b)},
                     InsertionRepair{"regret2", InsertionRule::regret(2)}};
  set.initializer = MultiStartInit{params.init_starts};
  set.selector = BanditSelector{params.bandit};
  set.weight_updater = RiskAdjustedUpdater{params.risk};
  set.acceptance = ToleranceAcceptance{params.tolerance};
  set.degree_controller = AdaptiveDegree{params.degree};
  return set;
}

}  // namespace alns
