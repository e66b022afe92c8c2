#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "alns/genome.hpp"

namespace alns {

/// Uniform grid over the behaviour space of one task.
struct GridSpec {
  std::vector<int> bins;
  std::vector<std::pair<double, double>> ranges;

  std::size_t dims() const noexcept { return bins.size(); }
  std::size_t cell_count() const;
};

/// 2D 5x4 for destroy/repair/acceptance/weight, 4x3x2 for degree, 5x5x2 for
/// init and 3x2x2x2 for the selector.
GridSpec grid_for(Slot task);

using Cell = std::vector<int>;

/// Uniform binning per dimension; values outside a range land in the edge bin.
Cell bin_descriptor(const std::vector<double>& descriptor, const GridSpec& grid);

struct Elite {
  Genome genome;
  double quality = 0.0;
  std::vector<double> descriptor;

  nlohmann::json to_json() const;
  static Elite from_json(const nlohmann::json& j);
};

enum class InsertOutcome { inserted, replaced, rejected };

class EliteArchive {
 public:
  EliteArchive(GridSpec grid, std::size_t capacity);

  /// Replace-if-strictly-better per cell. A new cell in a full archive is
  /// admitted only by evicting the globally worst elite, and only if the
  /// newcomer is strictly better than it.
  InsertOutcome insert(const Elite& elite);

  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const GridSpec& grid() const noexcept { return grid_; }
  const std::map<Cell, Elite>& cells() const noexcept { return cells_; }
  const Elite* at(const Cell& cell) const;

  /// Elites by descending quality; ties keep cell order.
  std::vector<const Elite*> ranked() const;
  const Elite& best() const;

  nlohmann::json to_json() const;
  static EliteArchive from_json(const nlohmann::json& j);

 private:
  GridSpec grid_;
  std::size_t capacity_;
  std::map<Cell, Elite> cells_;
};

enum class ParentMode { exploit, explore };

struct ParentChoice {
  ParentMode mode = ParentMode::exploit;
  const Elite* first = nullptr;
  /// Second crossover parent; equals `first` in exploit mode.
  const Elite* second = nullptr;
};

/// With probability `exploit_prob` one parent drawn uniformly from the top
/// quality quartile, otherwise two parents drawn uniformly from all elites.
ParentChoice select_parent(const EliteArchive& archive, Rng& rng, double exploit_prob = 0.7);

/// Number of elites an archive of `size` sends per migration: ceil(rate*size),
/// at least one for a non-empty archive.
std::size_t migrant_count(std::size_t size, double rate);

/// Ring migration: island i sends its best migrant_count elites to island
/// i+1. Emigrants are chosen before any island receives. Returns the number
/// of elites sent by each island.
std::vector<std::size_t> migrate(std::vector<EliteArchive>& islands, double rate = 0.1);

}  // namespace alns
