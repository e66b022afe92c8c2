#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alns/components.hpp"
#include "alns/tsp.hpp"

namespace alns {

struct EngineParams {
  double initial_temperature = 10000.0;
  double cooling_rate = 0.9995;
  bool record_history = true;

  void validate() const;
};

struct Budget {
  enum class Mode { iterations, wall_clock };
  Mode mode = Mode::iterations;
  /// Iterations, or whole seconds for wall_clock.
  std::int64_t limit = 1000;

  static Budget iterations(std::int64_t n) { return Budget{Mode::iterations, n}; }
  static Budget seconds(std::int64_t s) { return Budget{Mode::wall_clock, s}; }
  std::string mode_name() const { return mode == Mode::iterations ? "iterations" : "wall_clock"; }
};

/// Aggregate behaviour of a run, consumed by the evaluators.
struct RunStats {
  std::vector<std::int64_t> destroy_calls;
  std::vector<std::int64_t> repair_calls;
  /// Mean and population variance of the destruction ratio k / n.
  double degree_mean = 0.0;
  double degree_variance = 0.0;
  std::int64_t accepted = 0;
  std::int64_t improvements = 0;
};

struct RunResult {
  Cost best_cost = 0;
  Tour best_tour;
  std::int64_t iterations_done = 0;
  double elapsed_seconds = 0.0;
  /// (iteration, best cost) at the start and after every new best.
  std::vector<std::pair<std::int64_t, Cost>> history;
  RunStats stats;
};

/// Runs the ALNS loop. Every stochastic choice derives from `seed`, split
/// into one stream per component slot.
RunResult run(const Instance& instance, const ComponentSet& components, const Budget& budget,
              std::uint64_t seed, const EngineParams& params = {});

/// True iff the best tour is a permutation whose cost equals best_cost.
bool replay_check(const RunResult& result, const Instance& instance);

/// One CSV row: instance,seed,budget_mode,budget,best_cost,gap_percent,elapsed.
struct RunRecordRow {
  std::string instance;
  std::uint64_t seed = 0;
  Budget budget;
  Cost best_cost = 0;
  std::optional<double> gap_percent;
  double elapsed_seconds = 0.0;
};

std::string run_record_header();
std::string to_csv(const RunRecordRow& row);

}  // namespace alns
