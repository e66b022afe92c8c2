#include "alns/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace alns {
namespace {

std::size_t randomized_rank(std::size_t candidates, double p, Rng& rng) {
  const auto r = static_cast<std::size_t>(static_cast<double>(candidates) * std::pow(rng.uniform(), p));
  return std::min(r, candidates - 1);
}

// Survivors in tour order, given a removed-flag per tour position.
PartialSolution split(const Tour& tour, const std::vector<char>& removed_at, std::vector<Node> unrouted) {
  PartialSolution out;
  out.fragment.reserve(tour.order.size() - unrouted.size());
  for (std::size_t i = 0; i < tour.order.size(); ++i) {
    if (!removed_at[i]) out.fragment.push_back(tour.order[i]);
  }
  out.unrouted = std::move(unrouted);
  return out;
}

std::size_t rounded_degree(std::size_t n, double ratio) {
  const double raw = std::round(ratio * static_cast<double>(n));
  const double hi = static_cast<double>(n - 2);
  return static_cast<std::size_t>(std::clamp(raw, 1.0, hi));
}

}  // namespace

void BaselineParams::validate() const {
  if (!(initial_temperature > 0.0)) throw std::invalid_argument("initial_temperature must be positive");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw std::invalid_argument("cooling_rate must lie in (0, 1)");
  if (!(reaction_factor > 0.0 && reaction_factor <= 1.0)) {
    throw std::invalid_argument("reaction_factor must lie in (0, 1]");
  }
  if (!(destruction_ratio > 0.0 && destruction_ratio < 1.0)) {
    throw std::invalid_argument("destruction_ratio must lie in (0, 1)");
  }
  if (!(shaw_randomization >= 1.0) || !(worst_randomization >= 1.0)) {
    throw std::invalid_argument("randomization exponents must be >= 1");
  }
  for (double s : scores) {
    if (!(s >= 0.0)) throw std::invalid_argument("scores must be non-negative");
  }
  // the default tiers (33, 9, 13) rank acceptance above improvement, so only
  // the new-best tier is required to dominate
  if (scores[0] < scores[1] || scores[0] < scores[2]) {
    throw std::invalid_argument("the new-best score must be the largest tier");
  }
  if (segment_length < 1) throw std::invalid_argument("segment_length must be >= 1");
}

PartialSolution random_destroy(const Tour& tour, std::size_t k, Rng& rng) {
  const std::size_t n = tour.order.size();
  check_removal_size(n, k);
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::vector<char> removed(n, 0);
  std::vector<Node> unrouted;
  unrouted.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pos[i], pos[j]);
    removed[pos[i]] = 1;
    unrouted.push_back(tour.order[pos[i]]);
  }
  return split(tour, removed, std::move(unrouted));
}

PartialSolution worst_destroy(const Tour& tour, std::size_t k, const Instance& instance, double p, Rng& rng) {
  const std::size_t n = tour.order.size();
  check_removal_size(n, k);
  std::vector<std::size_t> prev(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  std::vector<char> removed(n, 0);
  std::vector<std::size_t> alive(n);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<std::pair<Cost, std::size_t>> ranked;
  std::vector<Node> unrouted;
  unrouted.reserve(k);

  const auto node_at = [&](std::size_t i) { return tour.order[i]; };
  for (std::size_t step = 0; step < k; ++step) {
    ranked.clear();
    for (std::size_t i : alive) {
      const Node a = node_at(prev[i]), v = node_at(i), b = node_at(next[i]);
      ranked.emplace_back(instance.dist(a, v) + instance.dist(v, b) - instance.dist(a, b), i);
    }
    const std::size_t r = randomized_rank(ranked.size(), p, rng);
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(r), ranked.end(),
                     [&](const auto& x, const auto& y) {
                       if (x.first != y.first) return x.first > y.first;
                       return node_at(x.second) < node_at(y.second);
                     });
    const std::size_t i = ranked[r].second;
    removed[i] = 1;
    unrouted.push_back(node_at(i));
    next[prev[i]] = next[i];
    prev[next[i]] = prev[i];
    alive.erase(std::find(alive.begin(), alive.end(), i));
  }
  return split(tour, removed, std::move(unrouted));
}

PartialSolution shaw_destroy(const Tour& tour, std::size_t k, const Instance& instance, double p, Rng& rng) {
  const std::size_t n = tour.order.size();
  check_removal_size(n, k);
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[static_cast<std::size_t>(tour.order[i])] = i;

  std::vector<char> removed(n, 0);
  std::vector<Node> unrouted;
  unrouted.reserve(k);
  std::vector<Node> remaining(tour.order.begin(), tour.order.end());
  std::sort(remaining.begin(), remaining.end());

  const auto take = [&](std::size_t idx) {
    const Node v = remaining[idx];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(idx));
    removed[position[static_cast<std::size_t>(v)]] = 1;
    unrouted.push_back(v);
  };
  take(static_cast<std::size_t>(rng.below(n)));

  // dividing by the max distance does not change the ranking, so raw
  // distances are compared directly
  std::vector<std::pair<Cost, Node>> ranked;
  while (unrouted.size() < k) {
    const Node r = unrouted[static_cast<std::size_t>(rng.below(unrouted.size()))];
    ranked.clear();
    for (Node v : remaining) ranked.emplace_back(instance.dist(r, v), v);
    const std::size_t rank = randomized_rank(ranked.size(), p, rng);
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(rank), ranked.end());
    const Node chosen = ranked[rank].second;
    take(static_cast<std::size_t>(std::lower_bound(remaining.begin(), remaining.end(), chosen) - remaining.begin()));
  }
  return split(tour, removed, std::move(unrouted));
}

Tour greedy_repair(PartialSolution partial, const Instance& instance) {
  return insertion_repair(std::move(partial), instance, InsertionRule::greedy());
}

Tour regret_repair(PartialSolution partial, const Instance& instance, int k_regret) {
  if (k_regret < 2 || k_regret > 3) throw std::invalid_argument("regret order must be 2 or 3");
  return insertion_repair(std::move(partial), instance, InsertionRule::regret(k_regret));
}

Tour nearest_neighbor_tour(const Instance& instance, Node start) {
  const std::size_t n = instance.size();
  if (start < 0 || static_cast<std::size_t>(start) >= n) throw std::out_of_range("start node out of range");
  std::vector<char> visited(n, 0);
  std::vector<Node> order;
  order.reserve(n);
  Node cur = start;
  visited[static_cast<std::size_t>(cur)] = 1;
  order.push_back(cur);
  while (order.size() < n) {
    Node best = -1;
    Cost best_d = std::numeric_limits<Cost>::max();
    for (std::size_t v = 0; v < n; ++v) {
      if (visited[v]) continue;
      const Cost d = instance.dist(cur, static_cast<Node>(v));
      if (d < best_d) {
        best_d = d;
        best = static_cast<Node>(v);
      }
    }
    visited[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    cur = best;
  }
  return Tour::from_order(instance, std::move(order));
}

Tour nn_initial(const Instance& instance, Rng& rng) {
  return nearest_neighbor_tour(instance, static_cast<Node>(rng.below(instance.size())));
}

Tour random_permutation_tour(const Instance& instance, Rng& rng) {
  std::vector<Node> order(instance.size());
  std::iota(order.begin(), order.end(), Node{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
  }
  return Tour::from_order(instance, std::move(order));
}

std::size_t roulette_select(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("roulette over an empty pool");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("roulette weights must be positive");
    total += w;
  }
  double x = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    x -= weights[i];
    if (x < 0.0) return i;
  }
  return weights.size() - 1;
}

double classic_score(const IterationRecord& record, const std::array<double, 3>& scores) {
  if (record.new_best) return scores[0];
  if (record.delta < 0) return scores[1];
  if (record.accepted) return scores[2];
  return 0.0;
}

double classic_weight_update(OperatorWeights& weights, std::size_t op, const IterationRecord& record,
                             const std::array<double, 3>& scores, double reaction_factor, bool segment_done) {
  if (op >= weights.size()) throw std::out_of_range("operator index out of range");
  const double score = classic_score(record, scores);
  weights.score_accum[op] += score;
  ++weights.usage[op];
  if (segment_done) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights.usage[i] > 0) {
        const double avg = weights.score_accum[i] / static_cast<double>(weights.usage[i]);
        // an operator that scored nothing keeps a small positive weight
        weights.weights[i] = std::max(1e-6, (1.0 - reaction_factor) * weights.weights[i] + reaction_factor * avg);
      }
      weights.usage[i] = 0;
      weights.score_accum[i] = 0.0;
    }
  }
  return score;
}

bool sa_accept(Cost delta, double temperature, Rng& rng) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (delta <= 0) return true;
  return rng.uniform() < std::exp(-static_cast<double>(delta) / temperature);
}

std::size_t fixed_degree(std::size_t n, double ratio) {
  if (n < 3) throw std::invalid_argument("degree needs at least 3 nodes");
  return rounded_degree(n, ratio);
}

ClassicWeightUpdater::ClassicWeightUpdater(std::array<double, 3> scores, double reaction_factor,
                                           std::int64_t segment_length)
    : scores_(scores), reaction_factor_(reaction_factor), segment_length_(segment_length) {
  if (segment_length_ < 1) throw std::invalid_argument("segment_length must be >= 1");
}

double ClassicWeightUpdater::update(const IterationRecord& record, SearchState& state) {
  const bool segment_done = (state.iteration + 1) % segment_length_ == 0;
  const double score =
      classic_weight_update(state.destroy.weights, record.destroy_index, record, scores_, reaction_factor_, segment_done);
  classic_weight_update(state.repair.weights, record.repair_index, record, scores_, reaction_factor_, segment_done);
  return scores_[0] > 0.0 ? score / scores_[0] : 0.0;
}

UniformDegree::UniformDegree(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo_ > 0.0 && lo_ <= hi_ && hi_ < 1.0)) throw std::invalid_argument("uniform degree needs 0 < lo <= hi < 1");
}

std::size_t UniformDegree::degree(std::size_t n, const SearchState&, Rng& rng) {
  if (n < 3) throw std::invalid_argument("degree needs at least 3 nodes");
  return rounded_degree(n, rng.uniform(lo_, hi_));
}

ComponentSet baseline_components(const BaselineParams& params) {
  params.validate();
  ComponentSet set;
  set.destroy_pool = {RandomDestroy{}, WorstDestroy{params.worst_randomization},
                      ShawDestroy{params.shaw_randomization}};
  set.repair_pool = {InsertionRepair{"greedy", InsertionRule::greedy()},
                     InsertionRepair{"regret2", InsertionRule::regret(2)},
                     InsertionRepair{"regret3", InsertionRule::regret(3)}};
  set.initializer = NearestNeighborInit{};
  set.selector = RouletteSelector{};
  set.weight_updater = ClassicWeightUpdater{params.scores, params.reaction_factor, params.segment_length};
  set.acceptance = SimulatedAnnealing{};
  set.degree_controller = FixedDegree{params.destruction_ratio};
  return set;
}

}  // namespace alns
