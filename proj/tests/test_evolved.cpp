#include <doctest.h>

#include <cmath>
#include <limits>

#include "alns/evolved.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace alns;

namespace {

std::vector<double> softmax(const std::vector<double>& s) {
  const double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> p;
  double z = 0;
  for (double x : s) z += std::exp(x - mx);
  for (double x : s) p.push_back(std::exp(x - mx) / z);
  return p;
}

}  // namespace

TEST_CASE("fresh bandit with no exploration or recency is uniform") {
  BanditParams params;
  params.rho = 1.0;
  params.c_ucb = 0.0;
  BanditPool pool(4, 1.0);
  Rng rng(1);
  std::vector<int> hits(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[bandit_select(pool, params, rng)];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 0.25) <= 0.01);
  CHECK(pool.recent.size() == 3);
}

TEST_CASE("bandit prefers the better posterior mean") {
  BanditParams params;
  params.rho = 1.0;
  BanditPool pool(2, 1.0);
  pool.a = {10, 1};
  pool.b = {1, 10};
  const auto p = bandit_probabilities(pool, params);
  CHECK(p[0] > p[1]);
  Rng rng(2);
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += bandit_select(pool, params, rng) == 0;
  CHECK(first > 5000);
}

TEST_CASE("recency damping lowers a repeatedly chosen arm") {
  BanditPool pool(3, 1.0);
  pool.a = {4, 2, 3};
  pool.recent = {0, 0, 0};
  BanditParams damped;
  damped.rho = 0.5;
  BanditParams plain = damped;
  plain.rho = 1.0;
  CHECK(bandit_probabilities(pool, damped)[0] < bandit_probabilities(pool, plain)[0]);
}

TEST_CASE("undamped bandit without exploration is a softmax over posterior means") {
  BanditParams params;
  params.rho = 1.0;
  params.c_ucb = 0.0;
  BanditPool pool(3, 1.0);
  pool.a = {2, 5, 1};
  pool.b = {3, 1, 1};
  pool.recent = {1, 2};
  const auto p = bandit_probabilities(pool, params);
  const auto q = softmax({2.0 / 5, 5.0 / 6, 1.0 / 2});
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
}

TEST_CASE("bandit feedback updates counts and momentum") {
  BanditParams params;
  BanditPool pool(2, 1.0);
  bandit_feedback(pool, 0, 1.0, params);
  bandit_feedback(pool, 1, -0.5, params);
  CHECK(pool.a[0] == 2);
  CHECK(pool.b[0] == 1);
  CHECK(pool.a[1] == 1);
  CHECK(pool.b[1] == 2);
  CHECK(pool.pulls[0] == 1);
  CHECK(pool.total == 2);
  CHECK(pool.momentum[0] == doctest::Approx(0.2));  // 0.8 * 0 + 0.2 * (1 - 0)
  for (std::size_t i = 0; i < 2; ++i) CHECK((pool.a[i] >= 1 && pool.b[i] >= 1));
}

TEST_CASE("risk-adjusted reward") {
  RiskAdjustParams p;
  IterationRecord worse;
  worse.delta = 10;
  worse.accepted = true;
  CHECK(risk_reward(worse, 500, 1000, p) < 0);
  worse.accepted = false;
  CHECK(risk_reward(worse, 500, 1000, p) < 0);
  CHECK(risk_lambda(1000, 1000, p) == doctest::Approx(p.lambda_min));
  CHECK(risk_lambda(1e-12, 1000, p) == doctest::Approx(p.lambda_max));
  CHECK(risk_reward(worse, 1000, 1000, p) == doctest::Approx(-p.lambda_min));
  IterationRecord best;
  best.delta = -3;
  best.new_best = best.accepted = true;
  CHECK(risk_reward(best, 1, 1000, p) == p.reward_best);
  IterationRecord improve;
  improve.delta = -3;
  improve.accepted = true;
  CHECK(risk_reward(improve, 1, 1000, p) == p.reward_improve);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    IterationRecord r;
    r.delta = static_cast<Cost>(rng.below(21)) - 10;
    if (r.delta == 0) continue;
    r.accepted = rng.bernoulli(0.5);
    const double reward = risk_reward(r, rng.uniform(1, 1000), 1000, p);
    CHECK((reward > 0) == (r.delta < 0));
  }
}

TEST_CASE("risk-adjusted update drives the bandit and keeps weights positive") {
  RiskAdjustParams p;
  BanditState bandit(2, 2, BanditParams{});
  OperatorWeights dw(2), rw(2);
  IterationRecord r;
  r.delta = 5;
  const double reward = risk_adjusted_update(bandit, dw, rw, r, 10, 100, p);
  CHECK(reward < 0);
  CHECK(bandit.destroy.b[0] == 2);
  CHECK(bandit.repair.b[0] == 2);
  // w <- 0.4 w + 0.6 max(0.01, mean(w) + reward)
  CHECK(dw.weights[0] == doctest::Approx(0.4 + 0.6 * std::max(0.01, 1.0 + reward)));
  for (int i = 0; i < 200; ++i) risk_weight_update(dw, 0, -5.0, p);
  CHECK(dw.weights[0] > 0);
}

TEST_CASE("tolerance acceptance") {
  Rng rng(4);
  CHECK(tolerance_accept(0, 10.0, 0.0, rng));
  CHECK_THROWS(tolerance_accept(1, 0.0, 0.0, rng));
  const std::uint64_t before = Rng(rng).next();
  CHECK(tolerance_accept(7, 10.0, 7.0, rng));  // delta == t_a, no draw consumed
  CHECK(Rng(rng).next() == before);
  const double T = 40.0, ta = 12.0;
  const Cost delta = static_cast<Cost>(std::llround(ta + T * std::log(2.0)));
  const double expected = std::exp(-(static_cast<double>(delta) - ta) / T);
  int acc = 0;
  for (int i = 0; i < 100000; ++i) acc += tolerance_accept(delta, T, ta, rng);
  CHECK(std::abs(acc / 100000.0 - expected) <= 0.02);
}

TEST_CASE("tolerance with zero buffer is simulated annealing decision for decision") {
  Rng a(5), b(5), gen(6);
  for (int i = 0; i < 20000; ++i) {
    const Cost delta = static_cast<Cost>(gen.below(60)) - 20;
    const double T = gen.uniform(0.5, 50);
    CHECK(tolerance_accept(delta, T, 0.0, a) == sa_accept(delta, T, b));
  }
}

TEST_CASE("tolerance dominates simulated annealing") {
  for (Cost delta : {1, 5, 20, 80}) {
    for (double T : {1.0, 10.0, 100.0}) {
      for (double ta : {0.0, 0.5, 3.0, 30.0}) {
        // acceptance probability of each rule computed from its definition
        const double p_sa = std::exp(-static_cast<double>(delta) / T);
        const double p_tol = static_cast<double>(delta) <= ta ? 1.0 : std::exp(-(static_cast<double>(delta) - ta) / T);
        CHECK(p_tol >= p_sa);
        if (ta == 0.0) CHECK(p_tol == p_sa);
      }
    }
  }
}

TEST_CASE("tolerance window threshold") {
  ToleranceWindow w(3);
  CHECK(w.threshold(0.3, 50, 100) == 0.0);
  w.observe(-4);
  w.observe(10);
  w.observe(20);
  CHECK(w.threshold(0.3, 50, 100) == doctest::Approx(0.3 * 15 * 0.5));
  w.observe(30);
  w.observe(40);
  CHECK(w.threshold(1.0, 100, 100) == doctest::Approx(30.0));
}

TEST_CASE("hybrid scores tie-break on the cheaper insertion") {
  Rng rng(7);
  int ties = 0;
  for (int trial = 0; trial < 20000 && ties < 20; ++trial) {
    const Instance inst = make_random_instance(6, rng.next(), 12.0);
    const PartialSolution p{{0, 1, 2}, {3, 4, 5}};
    const InsertionRule rule = hybrid_rule(trial % 2 ? HybridVariant::a : HybridVariant::b);
    // score every node at the first step by enumeration
    std::vector<std::pair<double, Cost>> scored;
    for (Node u : p.unrouted) {
      std::vector<Cost> c;
      for (std::size_t i = 0; i < 3; ++i) {
        const Node a = p.fragment[i], b = p.fragment[(i + 1) % 3];
        c.push_back(inst.dist(a, u) + inst.dist(u, b) - inst.dist(a, b));
      }
      std::sort(c.begin(), c.end());
      double regret = 0;
      for (int j = 1; j < rule.order; ++j) regret += static_cast<double>(c[static_cast<std::size_t>(j)] - c[0]);
      scored.emplace_back(rule.regret_weight * regret - rule.cost_weight * static_cast<double>(c[0]), c[0]);
    }
    const double top = std::max({scored[0].first, scored[1].first, scored[2].first});
    std::vector<std::size_t> at_top;
    for (std::size_t i = 0; i < 3; ++i) {
      if (scored[i].first == top) at_top.push_back(i);
    }
    if (at_top.size() < 2 || scored[at_top[0]].second == scored[at_top[1]].second) continue;
    ++ties;
    std::vector<InsertionStep> trace;
    insertion_repair(p, inst, rule, &trace);
    std::size_t cheapest = at_top[0];
    for (std::size_t i : at_top) {
      if (scored[i].second < scored[cheapest].second) cheapest = i;
    }
    CHECK(trace[0].node == p.unrouted[cheapest]);
  }
  CHECK(ties >= 5);
}

TEST_CASE("hybrid rules") {
  const InsertionRule a = hybrid_rule(HybridVariant::a);
  CHECK(a.order == 2);
  CHECK(a.regret_weight == 1.5);
  CHECK(a.cost_weight == 0.25);
  const InsertionRule b = hybrid_rule(HybridVariant::b);
  CHECK(b.order == 3);
  CHECK(b.regret_weight == 1.0);
  CHECK(b.cost_weight == 0.15);
}

TEST_CASE("string destroy removes a contiguous arc") {
  Rng rng(8);
  const Instance inst = make_random_instance(10, 8);
  const Tour t = random_permutation_tour(inst, rng);
  for (int trial = 0; trial < 200; ++trial) {
    const PartialSolution p = string_destroy(t, 4, rng);
    REQUIRE(p.unrouted.size() == 4);
    std::vector<bool> removed(10, false);
    for (Node v : p.unrouted) removed[static_cast<std::size_t>(v)] = true;
    int runs = 0;  // number of maximal removed arcs in cyclic order
    for (std::size_t i = 0; i < 10; ++i) {
      if (removed[static_cast<std::size_t>(t.order[i])] && !removed[static_cast<std::size_t>(t.order[(i + 9) % 10])]) {
        ++runs;
      }
    }
    CHECK(runs == 1);
  }
}

TEST_CASE("long edge destroy targets the dominant edge") {
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i), 0});
  const Instance inst = testing::points(pts);
  const Tour t = Tour::from_order(inst, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});  // closing edge 9-0 is long
  Rng rng(9);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const PartialSolution p = long_edge_destroy(t, 2, inst, 4.0, rng);
    REQUIRE(p.unrouted.size() == 2);
    std::vector<Node> u = p.unrouted;
    std::sort(u.begin(), u.end());
    hits += u == std::vector<Node>{0, 9};
  }
  CHECK(hits > 90);
}

TEST_CASE("cluster destroy is shaw removal with nearest choice") {
  Rng a(10), b(10);
  const Instance inst = make_random_instance(25, 10);
  const Tour t = random_permutation_tour(inst, a);
  Rng a2(11), b2(11);
  for (int i = 0; i < 50; ++i) {
    CHECK(cluster_destroy(t, 7, inst, a2).unrouted ==
          shaw_destroy(t, 7, inst, std::numeric_limits<double>::infinity(), b2).unrouted);
  }
}

TEST_CASE("adaptive degree") {
  DegreeControlParams p;
  CHECK(adaptive_ratio(0.0, 0, p) == doctest::Approx(p.d_max));
  CHECK(adaptive_ratio(1.0, 0, p) == doctest::Approx(p.d_min));
  CHECK(adaptive_ratio(1.0, p.stagnation_threshold + 1, p) == doctest::Approx(p.d_min + p.stagnation_boost));
  CHECK(adaptive_ratio(0.0, p.stagnation_threshold + 1, p) == doctest::Approx(p.d_max));
  CHECK(adaptive_ratio(1.0, p.stagnation_threshold, p) == doctest::Approx(p.d_min));
  Rng rng(12);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += static_cast<double>(adaptive_degree(1000, 0.0, 0, p, rng));
  CHECK(sum / 20000 / 1000 == doctest::Approx(p.d_max).epsilon(0.01));
  for (int i = 0; i < 5000; ++i) {
    const std::size_t n = 3 + rng.below(200);
    const std::size_t k = adaptive_degree(n, rng.uniform(), static_cast<std::int64_t>(rng.below(100)), p, rng);
    CHECK(k >= 1);
    CHECK(k <= n - 2);
  }
}

TEST_CASE("multi-start initial tour") {
  const Instance inst = load_tsplib(testing::tsplib("berlin52.tsp"));
  std::vector<Cost> nn(52);
  for (Node s = 0; s < 52; ++s) nn[static_cast<std::size_t>(s)] = nearest_neighbor_tour(inst, s).cost;
  Rng rng(13);
  double multi = 0, single = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng r(static_cast<std::uint64_t>(seed));
    const Tour t = evolved_initial(inst, 8, r);
    CHECK(is_valid_permutation(t.order, 52));
    // the result is one of the nearest-neighbour tours
    CHECK(std::find(nn.begin(), nn.end(), t.cost) != nn.end());
    multi += static_cast<double>(t.cost);
    single += static_cast<double>(nn_initial(inst, rng).cost);
  }
  CHECK(multi < single);
  Rng r(14);
  CHECK(evolved_initial(inst, 52, r).cost == *std::min_element(nn.begin(), nn.end()));
  const Instance tiny = make_random_instance(4, 1);
  CHECK(is_valid_permutation(evolved_initial(tiny, 8, r).order, 4));
}

TEST_CASE("evolved parameters validate") {
  EvolvedParams p;
  CHECK_NOTHROW(p.validate());
  p.degree.d_min = 0.6;
  CHECK_THROWS(p.validate());
  p = {};
  p.risk.lambda_min = 2;
  CHECK_THROWS(p.validate());
  p = {};
  p.tolerance.window = 0;
  CHECK_THROWS(p.validate());
}
