#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "alns/baseline.hpp"
#include "alns/evolved.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace alns;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tour identity_tour(const Instance& inst) {
  std::vector<Node> order(inst.size());
  std::iota(order.begin(), order.end(), 0);
  return Tour::from_order(inst, order);
}

Tour shuffled_tour(const Instance& inst, Rng& rng) { return random_permutation_tour(inst, rng); }

bool keeps_order(const Tour& tour, const PartialSolution& p) {
  std::size_t j = 0;
  for (Node v : tour.order) {
    if (j < p.fragment.size() && p.fragment[j] == v) ++j;
  }
  return j == p.fragment.size();
}

}  // namespace

TEST_CASE("random destroy cardinality and order") {
  Rng rng(1);
  const Instance inst = make_random_instance(5, 1);
  const Tour t = identity_tour(inst);
  const PartialSolution p = random_destroy(t, 2, rng);
  CHECK(p.unrouted.size() == 2);
  CHECK(p.fragment.size() == 3);
  CHECK(keeps_order(t, p));
  const Tour tri = identity_tour(testing::triangle());
  CHECK(random_destroy(tri, 1, rng).unrouted.size() == 1);
  CHECK_THROWS_AS(random_destroy(tri, 2, rng), ContractViolation);
  CHECK_THROWS_AS(random_destroy(tri, 0, rng), ContractViolation);
}

TEST_CASE("random destroy is uniform") {
  Rng rng(2);
  const Instance inst = make_random_instance(10, 2);
  const Tour t = identity_tour(inst);
  std::vector<int> hits(10, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(random_destroy(t, 1, rng).unrouted[0])];
  double chi2 = 0;
  for (int h : hits) {
    CHECK(h / double(draws) == doctest::Approx(0.1).epsilon(0.1));
    chi2 += (h - 1000.0) * (h - 1000.0) / 1000.0;
  }
  CHECK(chi2 < 27.88);  // chi-square, 9 dof, p = 0.001
}

TEST_CASE("worst destroy on collinear points") {
  const Instance line = testing::points({{0, 0}, {1, 0}, {2, 0}, {10, 0}});
  Rng rng(3);
  // savings: node0 = 1+10-10 = 1, node1 = 1+1-2 = 0, node2 = 1+8-9 = 0, node3 = 8+10-2 = 16
  const PartialSolution p = worst_destroy(identity_tour(line), 1, line, kInf, rng);
  CHECK(p.unrouted == std::vector<Node>{3});
  CHECK(worst_destroy(identity_tour(line), 2, line, 6.0, rng).fragment.size() == 2);
}

TEST_CASE("deterministic worst destroy removes the maximal saving at every step") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = make_random_instance(6 + trial % 15, rng.next());
    const Tour t = shuffled_tour(inst, rng);
    const std::size_t k = 1 + rng.below(inst.size() - 2);
    const PartialSolution p = worst_destroy(t, k, inst, kInf, rng);
    // replay the greedy removal sequence by enumeration
    std::vector<Node> cur = t.order;
    for (Node removed : p.unrouted) {
      Cost best = std::numeric_limits<Cost>::min();
      Node arg = -1;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const Node a = cur[(i + cur.size() - 1) % cur.size()], v = cur[i], b = cur[(i + 1) % cur.size()];
        const Cost s = inst.dist(a, v) + inst.dist(v, b) - inst.dist(a, b);
        if (s > best || (s == best && v < arg)) {
          best = s;
          arg = v;
        }
      }
      CHECK(removed == arg);
      cur.erase(std::find(cur.begin(), cur.end(), removed));
    }
    CHECK(cur == p.fragment);
  }
}

TEST_CASE("shaw destroy with deterministic ranking stays in one cluster") {
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({static_cast<double>(i), static_cast<double>(i % 2)});
  for (int i = 0; i < 5; ++i) pts.push_back({1000.0 + i, static_cast<double>(i % 2)});
  const Instance inst = testing::points(pts);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Tour t = shuffled_tour(inst, rng);
    const PartialSolution p = shaw_destroy(t, 4, inst, kInf, rng);
    REQUIRE(p.unrouted.size() == 4);
    const bool cluster_a = p.unrouted.front() < 5;
    for (Node v : p.unrouted) CHECK((v < 5) == cluster_a);
    CHECK(keeps_order(t, p));
  }
}

TEST_CASE("shaw destroy with k=1 or p=1 matches uniform removal") {
  const Instance inst = make_random_instance(10, 6);
  const Tour t = identity_tour(inst);
  Rng rng(6);
  const int draws = 20000;
  std::vector<int> single(10, 0), shaw3(10, 0), random3(10, 0);
  for (int i = 0; i < draws; ++i) {
    ++single[static_cast<std::size_t>(shaw_destroy(t, 1, inst, 6.0, rng).unrouted[0])];
    for (Node v : shaw_destroy(t, 3, inst, 1.0, rng).unrouted) ++shaw3[static_cast<std::size_t>(v)];
    for (Node v : random_destroy(t, 3, rng).unrouted) ++random3[static_cast<std::size_t>(v)];
  }
  for (std::size_t v = 0; v < 10; ++v) {
    CHECK(single[v] / double(draws) == doctest::Approx(0.1).epsilon(0.1));
    CHECK(shaw3[v] / double(draws) == doctest::Approx(random3[v] / double(draws)).epsilon(0.06));
  }
}

TEST_CASE("greedy repair small cases") {
  const Instance tri = testing::triangle();
  CHECK(greedy_repair({{0, 1}, {2}}, tri).cost == 12);
  const Instance sq = testing::points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  for (Node corner = 0; corner < 4; ++corner) {
    PartialSolution p;
    for (Node v = 0; v < 4; ++v) (v == corner ? p.unrouted : p.fragment).push_back(v);
    CHECK(greedy_repair(p, sq).cost == 4);
  }
}

TEST_CASE("insertion repairs follow the enumeration oracle") {
  Rng rng(7);
  const std::vector<std::pair<InsertionRule, const char*>> rules{
      {InsertionRule::greedy(), "greedy"},
      {InsertionRule::regret(2), "regret2"},
      {InsertionRule::regret(3), "regret3"},
      {hybrid_rule(HybridVariant::a), "hybrid_a"},
      {hybrid_rule(HybridVariant::b), "hybrid_b"}};
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    const Instance inst = make_random_instance(n, rng.next(), trial % 3 == 0 ? 20.0 : 1000.0);
    const Tour t = shuffled_tour(inst, rng);
    const std::size_t k = 1 + rng.below(n - 1);  // fragment may drop below two nodes
    const PartialSolution p = random_destroy(Tour::from_order(inst, t.order), std::min(k, n - 2), rng);
    for (const auto& [rule, name] : rules) {
      CAPTURE(name);
      std::vector<InsertionStep> trace;
      const Tour out = insertion_repair(p, inst, rule, &trace);
      const auto expect =
          oracle::simulate_insertion(p.fragment, p.unrouted, inst, rule.order, rule.regret_weight, rule.cost_weight);
      REQUIRE(trace.size() == expect.size());
      for (std::size_t s = 0; s < trace.size(); ++s) {
        CHECK(trace[s].node == expect[s].node);
        CHECK(trace[s].after == expect[s].after);
        CHECK(trace[s].cost == expect[s].cost);
      }
      CHECK(is_valid_permutation(out.order, n));
      CHECK(out.cost == tour_cost(inst, out.order));
    }
  }
}

TEST_CASE("full destroy of a 7-node instance rebuilds like the oracle") {
  const Instance inst = make_random_instance(7, 11);
  const PartialSolution empty{{}, {0, 1, 2, 3, 4, 5, 6}};
  std::vector<InsertionStep> trace;
  const Tour out = insertion_repair(empty, inst, InsertionRule::greedy(), &trace);
  const auto expect = oracle::simulate_insertion({}, empty.unrouted, inst, 1, 0.0, 1.0);
  REQUIRE(trace.size() == expect.size());
  for (std::size_t s = 0; s < trace.size(); ++s) CHECK(trace[s].node == expect[s].node);
  CHECK(out.cost == greedy_repair(empty, inst).cost);
}

TEST_CASE("regret with one unrouted node equals greedy") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = make_random_instance(5 + trial % 10, rng.next());
    const PartialSolution p = random_destroy(shuffled_tour(inst, rng), 1, rng);
    const Tour g = greedy_repair(p, inst);
    CHECK(regret_repair(p, inst, 2).order == g.order);
    CHECK(regret_repair(p, inst, 3).order == g.order);
    CHECK(hybrid_regret_repair(p, inst, HybridVariant::a).order == g.order);
    CHECK(hybrid_regret_repair(p, inst, HybridVariant::b).order == g.order);
  }
}

// On a 2-node fragment both positions cost the same, so regret needs a triangle to start from.
TEST_CASE("a separating 5-node case where regret-2 beats greedy") {
  Rng rng(9);
  bool found = false;
  for (int trial = 0; trial < 5000 && !found; ++trial) {
    const Instance inst = make_random_instance(5, rng.next());
    const PartialSolution p{{0, 1, 2}, {3, 4}};
    std::vector<InsertionStep> tg, tr;
    const Tour g = insertion_repair(p, inst, InsertionRule::greedy(), &tg);
    const Tour r = insertion_repair(p, inst, InsertionRule::regret(2), &tr);
    if (tg[0].node != tr[0].node && r.cost < g.cost) found = true;
  }
  CHECK(found);
}

TEST_CASE("nearest neighbour construction") {
  const Instance line = testing::points({{0, 0}, {1, 0}, {3, 0}, {7, 0}});
  CHECK(nearest_neighbor_tour(line, 0).order == std::vector<Node>{0, 1, 2, 3});
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = make_random_instance(3 + trial, rng.next());
    const Tour t = nn_initial(inst, rng);
    CHECK(is_valid_permutation(t.order, inst.size()));
    CHECK(t.cost == tour_cost(inst, t.order));
  }
}

TEST_CASE("berlin52 nearest-neighbour regression bound") {
  const Instance inst = load_tsplib(testing::tsplib("berlin52.tsp"));
  double sum = 0;
  for (Node s = 0; s < 52; ++s) sum += static_cast<double>(nearest_neighbor_tour(inst, s).cost);
  // observed mean over all starts: 1.2431 x optimum
  CHECK(sum / 52.0 <= 1.35 * 7542);
}

TEST_CASE("roulette selection frequencies") {
  Rng rng(11);
  const int draws = 100000;
  const std::vector<double> uniform{1, 1, 1, 1};
  std::vector<int> hits(4, 0);
  for (int i = 0; i < draws; ++i) ++hits[roulette_select(uniform, rng)];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 0.25) <= 0.01);
  const std::vector<double> skew{3, 1};
  int zero = 0;
  for (int i = 0; i < draws; ++i) zero += roulette_select(skew, rng) == 0;
  CHECK(std::abs(zero / double(draws) - 0.75) <= 0.01);
  const std::vector<double> bad{1, 0};
  CHECK_THROWS(roulette_select(bad, rng));
}

TEST_CASE("classic weight update") {
  const std::array<double, 3> scores{33, 9, 13};
  SUBCASE("score tiers follow the configured mapping") {
    IterationRecord r;
    r.new_best = true;
    r.accepted = true;
    r.delta = -5;
    CHECK(classic_score(r, scores) == 33);
    r.new_best = false;
    CHECK(classic_score(r, scores) == 9);
    r.delta = 4;
    CHECK(classic_score(r, scores) == 13);
    r.accepted = false;
    CHECK(classic_score(r, scores) == 0);
  }
  SUBCASE("smoothing formula and unused operators") {
    OperatorWeights w(2);
    w.usage[0] = 1;
    w.score_accum[0] = 6.0;
    IterationRecord rejected;
    classic_weight_update(w, 0, rejected, scores, 0.45, true);
    CHECK(w.weights[0] == doctest::Approx(1.9));
    CHECK(w.weights[1] == 1.0);
    CHECK(w.usage[0] == 0);
    CHECK(w.score_accum[0] == 0.0);
  }
  SUBCASE("weights stay positive") {
    OperatorWeights w(3);
    Rng rng(12);
    for (int it = 0; it < 5000; ++it) {
      IterationRecord r;
      r.accepted = rng.bernoulli(0.1);
      classic_weight_update(w, rng.below(3), r, scores, 1.0, (it + 1) % 10 == 0);
      for (double x : w.weights) CHECK(x > 0.0);
    }
  }
}

TEST_CASE("simulated annealing acceptance") {
  Rng rng(13);
  CHECK(sa_accept(-5, 1.0, rng));
  CHECK(sa_accept(0, 1.0, rng));
  CHECK_THROWS(sa_accept(1, 0.0, rng));
  const int trials = 100000;
  for (const auto& [delta, temp] : std::vector<std::pair<Cost, double>>{{7, 10.0}, {50, 30.0}, {3, 1.5}}) {
    int acc = 0;
    for (int i = 0; i < trials; ++i) acc += sa_accept(delta, temp, rng);
    CHECK(std::abs(acc / double(trials) - std::exp(-delta / temp)) <= 0.02);
  }
  int acc = 0;
  for (int i = 0; i < 1000; ++i) acc += sa_accept(100, 1e-6, rng);
  CHECK(acc == 0);
}

TEST_CASE("fixed destruction degree") {
  CHECK(fixed_degree(52, 0.5) == 26);
  CHECK(fixed_degree(3, 0.5) == 1);
  CHECK(fixed_degree(4, 0.5) == 2);
  CHECK(fixed_degree(10, 0.99) == 8);
  CHECK(fixed_degree(10, 0.01) == 1);
}

TEST_CASE("every destroy operator returns k nodes and keeps survivor order") {
  Rng rng(14);
  const auto base = baseline_components();
  const auto evo = evolved_components();
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = make_random_instance(4 + trial % 30, rng.next());
    const Tour t = shuffled_tour(inst, rng);
    const std::size_t k = 1 + rng.below(inst.size() - 2);
    for (const auto* pool : {&base.destroy_pool, &evo.destroy_pool}) {
      for (const auto& op : *pool) {
        CAPTURE(op->name());
        const PartialSolution p = op->destroy(t, k, inst, rng);
        CHECK(p.unrouted.size() == k);
        CHECK(is_valid_partial(p, inst.size()));
        CHECK(keeps_order(t, p));
      }
    }
  }
}

TEST_CASE("every repair operator returns a complete tour") {
  Rng rng(15);
  const auto base = baseline_components();
  const auto evo = evolved_components();
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = make_random_instance(4 + trial % 30, rng.next());
    const PartialSolution p = random_destroy(shuffled_tour(inst, rng), 1 + rng.below(inst.size() - 2), rng);
    for (const auto* pool : {&base.repair_pool, &evo.repair_pool}) {
      for (const auto& op : *pool) {
        const Tour t = op->repair(p, inst, rng);
        CHECK(is_valid_permutation(t.order, inst.size()));
        CHECK(t.cost == tour_cost(inst, t.order));
      }
    }
  }
}

TEST_CASE("baseline parameters validate") {
  BaselineParams p;
  CHECK_NOTHROW(p.validate());
  p.cooling_rate = 1.0;
  CHECK_THROWS(p.validate());
  p = {};
  p.scores = {33, -1, 13};
  CHECK_THROWS(p.validate());
}
