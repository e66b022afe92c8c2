#pragma once

#include <vector>

#include "alns/tsp.hpp"

namespace alns {

/// Scoring rule for cheapest-insertion style repair.
///
/// For an unrouted node let c1 <= c2 <= ... be its insertion costs over all
/// fragment edges and R = sum_{j=2..order} (c_j - c1). Each step inserts the
/// node maximising  regret_weight * R - cost_weight * c1  at its cheapest
/// edge. Ties go to the smaller c1, then the lower node index; a node's
/// cheapest edge is the one with the lowest start node among equal costs.
///
/// greedy  = {order 1, regret 0, cost 1}
/// regret-k = {order k, regret 1, cost 0}
struct InsertionRule {
  int order = 1;
  double regret_weight = 0.0;
  double cost_weight = 1.0;

  static InsertionRule greedy() { return {1, 0.0, 1.0}; }
  static InsertionRule regret(int k) { return {k, 1.0, 0.0}; }
};

/// Insertion-cost placeholder when a node has fewer than `order` candidate
/// edges; makes such nodes maximally urgent.
inline constexpr double kMissingPositionCost = 1e12;

/// One decision of an insertion repair: `node` placed on the edge leaving
/// `after`, at marginal cost `cost`.
struct InsertionStep {
  Node node = 0;
  Node after = 0;
  Cost cost = 0;
};

/// Reinserts every unrouted node. A fragment with fewer than two nodes is
/// first topped up with the lowest-index unrouted nodes. If `trace` is given
/// it receives the decision sequence (top-up steps excluded).
Tour insertion_repair(PartialSolution partial, const Instance& instance, const InsertionRule& rule,
                      std::vector<InsertionStep>* trace = nullptr);

}  // namespace alns
