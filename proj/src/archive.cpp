#include "alns/archive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alns {

std::size_t GridSpec::cell_count() const {
  std::size_t c = 1;
  for (int b : bins) c *= static_cast<std::size_t>(b);
  return c;
}

GridSpec grid_for(Slot task) {
  const std::pair<double, double> unit{0.0, 1.0};
  switch (task) {
    case Slot::degree: return {{4, 3, 2}, {unit, unit, {0.0, 0.02}}};
    case Slot::initializer: return {{5, 5, 2}, {unit, unit, {0.0, 0.005}}};
    case Slot::selector: return {{3, 2, 2, 2}, {unit, unit, unit, unit}};
    default: return {{5, 4}, {unit, unit}};
  }
}

Cell bin_descriptor(const std::vector<double>& descriptor, const GridSpec& grid) {
  if (descriptor.size() != grid.dims()) throw std::invalid_argument("descriptor dimension does not match the grid");
  Cell cell(grid.dims());
  for (std::size_t i = 0; i < grid.dims(); ++i) {
    const auto [lo, hi] = grid.ranges[i];
    const double t = (descriptor[i] - lo) / (hi - lo);
    const double raw = std::isfinite(t) ? std::floor(t * grid.bins[i]) : 0.0;
    cell[i] = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(grid.bins[i] - 1)));
  }
  return cell;
}

nlohmann::json Elite::to_json() const {
  return {{"genome", genome.to_json()}, {"quality", quality}, {"descriptor", descriptor}};
}

Elite Elite::from_json(const nlohmann::json& j) {
  Elite e;
  e.genome = Genome::from_json(j.at("genome"));
  e.quality = j.at("quality").get<double>();
  e.descriptor = j.at("descriptor").get<std::vector<double>>();
  return e;
}

EliteArchive::EliteArchive(GridSpec grid, std::size_t capacity) : grid_(std::move(grid)), capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("archive capacity must be positive");
}

InsertOutcome EliteArchive::insert(const Elite& elite) {
  const Cell cell = bin_descriptor(elite.descriptor, grid_);
  if (auto it = cells_.find(cell); it != cells_.end()) {
    if (elite.quality > it->second.quality) {
      it->second = elite;
      return InsertOutcome::replaced;
    }
    return InsertOutcome::rejected;
  }
  if (cells_.size() < capacity_) {
    cells_.emplace(cell, elite);
    return InsertOutcome::inserted;
  }
  auto worst = std::min_element(cells_.begin(), cells_.end(),
                                [](const auto& a, const auto& b) { return a.second.quality < b.second.quality; });
  if (elite.quality <= worst->second.quality) return InsertOutcome::rejected;
  cells_.erase(worst);
  cells_.emplace(cell, elite);
  return InsertOutcome::inserted;
}

const Elite* EliteArchive::at(const Cell& cell) const {
  const auto it = cells_.find(cell);
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<const Elite*> EliteArchive::ranked() const {
  std::vector<const Elite*> out;
  out.reserve(cells_.size());
  for (const auto& [cell, e] : cells_) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), [](const Elite* a, const Elite* b) { return a->quality > b->quality; });
  return out;
}

const Elite& EliteArchive::best() const {
  if (cells_.empty()) throw std::logic_error("archive is empty");
  return *ranked().front();
}

nlohmann::json EliteArchive::to_json() const {
  nlohmann::json elites = nlohmann::json::array();
  for (const auto& [cell, e] : cells_) elites.push_back(e.to_json());
  return {{"bins", grid_.bins}, {"ranges", grid_.ranges}, {"capacity", capacity_}, {"elites", elites}};
}

EliteArchive EliteArchive::from_json(const nlohmann::json& j) {
  GridSpec grid;
  grid.bins = j.at("bins").get<std::vector<int>>();
  grid.ranges = j.at("ranges").get<std::vector<std::pair<double, double>>>();
  EliteArchive a(grid, j.at("capacity").get<std::size_t>());
  for (const auto& e : j.at("elites")) {
    Elite elite = Elite::from_json(e);
    a.cells_.emplace(bin_descriptor(elite.descriptor, grid), std::move(elite));
  }
  return a;
}

ParentChoice select_parent(const EliteArchive& archive, Rng& rng, double exploit_prob) {
  if (archive.empty()) throw std::invalid_argument("cannot select a parent from an empty archive");
  const auto ranked = archive.ranked();
  ParentChoice c;
  if (rng.bernoulli(exploit_prob)) {
    const std::size_t top = std::max<std::size_t>(1, (ranked.size() + 3) / 4);
    c.mode = ParentMode::exploit;
    c.first = ranked[static_cast<std::size_t>(rng.below(top))];
    c.second = c.first;
  } else {
    c.mode = ParentMode::explore;
    c.first = ranked[static_cast<std::size_t>(rng.below(ranked.size()))];
    c.second = ranked[static_cast<std::size_t>(rng.below(ranked.size()))];
  }
  return c;
}

std::size_t migrant_count(std::size_t size, double rate) {
  if (size == 0) return 0;
  const auto n = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(size) - 1e-9));
  return std::clamp<std::size_t>(n, 1, size);
}

std::vector<std::size_t> migrate(std::vector<EliteArchive>& islands, double rate) {
  std::vector<std::size_t> sent(islands.size(), 0);
  if (islands.size() < 2) return sent;
  std::vector<std::vector<Elite>> outgoing(islands.size());
  for (std::size_t i = 0; i < islands.size(); ++i) {
    const auto ranked = islands[i].ranked();
    const std::size_t n = migrant_count(ranked.size(), rate);
    for (std::size_t j = 0; j < n; ++j) outgoing[i].push_back(*ranked[j]);
    sent[i] = n;
  }
  for (std::size_t i = 0; i < islands.size(); ++i) {
    auto& target = islands[(i + 1) % islands.size()];
    for (const auto& e : outgoing[i]) target.insert(e);
  }
  return sent;
}

}  // namespace alns
