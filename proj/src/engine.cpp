#include "alns/engine.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace alns {

void ComponentSet::validate() const {
  if (destroy_pool.empty()) throw std::invalid_argument("destroy pool is empty");
  if (repair_pool.empty()) throw std::invalid_argument("repair pool is empty");
  for (const auto& d : destroy_pool) {
    if (!d) throw std::invalid_argument("null destroy operator");
  }
  for (const auto& r : repair_pool) {
    if (!r) throw std::invalid_argument("null repair operator");
  }
  if (!initializer) throw std::invalid_argument("initial-solution slot is unset");
  if (!selector) throw std::invalid_argument("selector slot is unset");
  if (!weight_updater) throw std::invalid_argument("weight-updater slot is unset");
  if (!acceptance) throw std::invalid_argument("acceptance slot is unset");
  if (!degree_controller) throw std::invalid_argument("degree-controller slot is unset");
}

std::string ComponentSet::describe() const {
  std::ostringstream out;
  out << "destroy=[";
  for (std::size_t i = 0; i < destroy_pool.size(); ++i) out << (i ? "," : "") << destroy_pool[i]->name();
  out << "] repair=[";
  for (std::size_t i = 0; i < repair_pool.size(); ++i) out << (i ? "," : "") << repair_pool[i]->name();
  out << "] init=" << initializer->name() << " selector=" << selector->name()
      << " weights=" << weight_updater->name() << " acceptance=" << acceptance->name()
      << " degree=" << degree_controller->name();
  return out.str();
}

std::string_view to_string(Slot slot) {
  switch (slot) {
    case Slot::destroy: return "destroy";
    case Slot::repair: return "repair";
    case Slot::initializer: return "init";
    case Slot::selector: return "selector";
    case Slot::weight_updater: return "weight";
    case Slot::acceptance: return "acceptance";
    case Slot::degree: return "degree";
  }
  return "?";
}

Slot parse_slot(std::string_view name) {
  for (Slot s : kAllSlots) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown component slot: " + std::string(name));
}

ComponentSet substitute_slot(const ComponentSet& base, const ComponentSet& donor, Slot slot) {
  ComponentSet out = base;
  switch (slot) {
    case Slot::destroy: out.destroy_pool = donor.destroy_pool; break;
    case Slot::repair: out.repair_pool = donor.repair_pool; break;
    case Slot::initializer: out.initializer = donor.initializer; break;
    case Slot::selector: out.selector = donor.selector; break;
    case Slot::weight_updater: out.weight_updater = donor.weight_updater; break;
    case Slot::acceptance: out.acceptance = donor.acceptance; break;
    case Slot::degree: out.degree_controller = donor.degree_controller; break;
  }
  return out;
}

void check_removal_size(std::size_t n, std::size_t k) {
  if (k < 1 || k + 2 > n) {
    throw ContractViolation("removal size " + std::to_string(k) + " outside [1, " +
                            std::to_string(n >= 2 ? n - 2 : 0) + "]");
  }
}

void EngineParams::validate() const {
  if (!(initial_temperature > 0.0)) throw std::invalid_argument("initial temperature must be positive");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) {
    throw std::invalid_argument("cooling rate must lie in (0, 1)");
  }
}

RunResult run(const Instance& instance, const ComponentSet& components, const Budget& budget,
              std::uint64_t seed, const EngineParams& params) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  if (budget.limit <= 0) throw std::invalid_argument("budget limit must be positive");
  params.validate();
  components.validate();
  ComponentSet set = components;  // fresh per-run component state

  const std::size_t n = instance.size();
  const std::size_t n_destroy = set.destroy_pool.size();
  const std::size_t n_repair = set.repair_pool.size();

  const Rng root(seed);
  Rng rng_init = root.fork("initializer");
  Rng rng_select = root.fork("selector");
  Rng rng_degree = root.fork("degree");
  Rng rng_destroy = root.fork("destroy");
  Rng rng_repair = root.fork("repair");
  Rng rng_accept = root.fork("acceptance");

  SearchState state;
  state.current = set.initializer->build(instance, rng_init);
  if (!is_valid_permutation(state.current.order, n) ||
      tour_cost(instance, state.current.order) != state.current.cost) {
    throw ContractViolation("initializer '" + set.initializer->name() + "' returned an invalid tour");
  }
  state.best = state.current;
  state.initial_temperature = params.initial_temperature;
  state.temperature = params.initial_temperature;
  state.destroy = PoolStats(n_destroy);
  state.repair = PoolStats(n_repair);
  set.selector->reset(n_destroy, n_repair);

  RunResult result;
  result.stats.destroy_calls.assign(n_destroy, 0);
  result.stats.repair_calls.assign(n_repair, 0);
  if (params.record_history) result.history.emplace_back(0, state.best.cost);

  double degree_sum = 0.0;
  double degree_sq_sum = 0.0;
  std::int64_t it = 0;
  const auto push_recent = [](PoolStats& pool, std::size_t idx) {
    pool.recent.push_back(idx);
    while (pool.recent.size() > 3) pool.recent.pop_front();
  };

  for (;; ++it) {
    if (budget.mode == Budget::Mode::iterations) {
      if (it >= budget.limit) break;
      state.progress = static_cast<double>(it) / static_cast<double>(budget.limit);
    } else {
      const double t = elapsed();
      if (t >= static_cast<double>(budget.limit)) break;
      state.progress = std::min(1.0, t / static_cast<double>(budget.limit));
    }
    state.iteration = it;
    state.temperature = params.initial_temperature * std::pow(params.cooling_rate, static_cast<double>(it));

    const OperatorPair pair = set.selector->select(state, rng_select);
    if (pair.destroy >= n_destroy || pair.repair >= n_repair) {
      throw ContractViolation("selector '" + set.selector->name() + "' returned an out-of-range index");
    }
    const std::size_t k = set.degree_controller->degree(n, state, rng_degree);
    check_removal_size(n, k);

    const auto& destroy_op = set.destroy_pool[pair.destroy];
    PartialSolution partial = destroy_op->destroy(state.current, k, instance, rng_destroy);
    if (partial.unrouted.size() != k || !is_valid_partial(partial, n)) {
      throw ContractViolation("destroy operator '" + destroy_op->name() + "' broke the partial-solution contract");
    }
    const auto& repair_op = set.repair_pool[pair.repair];
    Tour candidate = repair_op->repair(std::move(partial), instance, rng_repair);
    if (candidate.order.size() != n) {
      throw ContractViolation("repair operator '" + repair_op->name() + "' left " +
                              std::to_string(n - std::min(n, candidate.order.size())) + " nodes unrouted");
    }
#ifndef NDEBUG
    if (!is_valid_permutation(candidate.order, n) || tour_cost(instance, candidate.order) != candidate.cost) {
      throw ContractViolation("repair operator '" + repair_op->name() + "' produced an invalid tour");
    }
#endif

    IterationRecord record;
    record.destroy_index = pair.destroy;
    record.repair_index = pair.repair;
    record.removal_size = k;
    record.delta = candidate.cost - state.current.cost;
    record.accepted = set.acceptance->accept(record.delta, state, rng_accept);
    record.new_best = candidate.cost < state.best.cost;
    if (record.new_best) record.accepted = true;

    if (record.accepted) {
      state.current = std::move(candidate);
      ++result.stats.accepted;
    }
    if (record.new_best) {
      state.best = state.current;
      state.stagnation = 0;
      ++result.stats.improvements;
      if (params.record_history) result.history.emplace_back(it + 1, state.best.cost);
    } else {
      ++state.stagnation;
    }

    ++state.destroy.calls[pair.destroy];
    ++state.repair.calls[pair.repair];
    ++result.stats.destroy_calls[pair.destroy];
    ++result.stats.repair_calls[pair.repair];
    push_recent(state.destroy, pair.destroy);
    push_recent(state.repair, pair.repair);

    const double reward = set.weight_updater->update(record, state);
    state.destroy.cumulative_reward[pair.destroy] += reward;
    state.repair.cumulative_reward[pair.repair] += reward;
    set.selector->feedback(record, reward);

    const double ratio = static_cast<double>(k) / static_cast<double>(n);
    degree_sum += ratio;
    degree_sq_sum += ratio * ratio;
  }

  if (!is_valid_permutation(state.best.order, n) || tour_cost(instance, state.best.order) != state.best.cost) {
    throw ContractViolation("best tour failed final validation");
  }

  result.iterations_done = it;
  if (it > 0) {
    result.stats.degree_mean = degree_sum / static_cast<double>(it);
    result.stats.degree_variance =
        std::max(0.0, degree_sq_sum / static_cast<double>(it) - result.stats.degree_mean * result.stats.degree_mean);
  }
  result.best_cost = state.best.cost;
  result.best_tour = std::move(state.best);
  result.elapsed_seconds = elapsed();
  return result;
}

bool replay_check(const RunResult& result, const Instance& instance) {
  const auto& order = result.best_tour.order;
  if (!is_valid_permutation(order, instance.size())) return false;
  return tour_cost(instance, order) == result.best_cost;
}

std::string run_record_header() { return "instance,seed,budget_mode,budget,best_cost,gap_percent,elapsed_seconds"; }

std::string to_csv(const RunRecordRow& row) {
  std::ostringstream out;
  out << row.instance << ',' << row.seed << ',' << row.budget.mode_name() << ',' << row.budget.limit << ','
      << row.best_cost << ',';
  if (row.gap_percent) out << std::fixed << std::setprecision(6) << *row.gap_percent;
  out << ',' << std::fixed << std::setprecision(6) << row.elapsed_seconds;
  return out.str();
}

}  // namespace alns
