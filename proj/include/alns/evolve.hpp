#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "alns/archive.hpp"
#include "alns/evaluator.hpp"
#include "alns/proposer.hpp"

namespace alns {

struct EvolveConfig {
  Slot task = Slot::acceptance;
  int generations = 500;
  /// 0 selects the default: 4 islands for init, 2 otherwise.
  int islands = 0;
  /// 0 selects the default: 50 for init, 20 otherwise.
  std::size_t capacity = 0;
  std::uint64_t seed = 0;
  double exploit_prob = 0.7;
  int migration_interval = 10;
  double migration_rate = 0.1;
  MutationParams mutation;
  /// When set, a snapshot is written after every generation and the run
  /// resumes from the newest snapshot found there.
  std::optional<std::filesystem::path> checkpoint_dir;
  int keep_checkpoints = 3;
  /// Island worker threads; 0 means one per island up to the core count.
  int threads = 0;

  int island_count() const;
  std::size_t archive_capacity() const;
  void validate() const;
};

struct EvolveResult {
  std::vector<EliteArchive> archives;
  Elite best;
  /// Evaluation of the weak seed genome under the same evaluator seed.
  Elite seed;
  /// Best quality over all islands after each generation.
  std::vector<double> best_history;
  int generations_done = 0;
  int resumed_from = -1;
  int evaluation_failures = 0;
};

/// Seed handed to the evaluator for every candidate of a run, so qualities
/// are comparable across generations and islands.
std::uint64_t evaluation_seed(std::uint64_t master_seed);

/// Called after each generation with (generation index, best quality).
using ProgressFn = std::function<void(int, double)>;

EvolveResult evolve_task(const EvolveConfig& config, const Evaluator& evaluator, Proposer& proposer,
                         const ProgressFn& progress = {});

}  // namespace alns
