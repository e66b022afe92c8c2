#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alns/rng.hpp"
#include "alns/tsp.hpp"

namespace alns {

/// Raised when a component breaks its contract (e.g. a repair operator that
/// leaves nodes unrouted).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Polymorphic value: owns a T-derived object and deep-copies it via clone().
template <class T>
class Poly {
 public:
  Poly() = default;
  Poly(std::unique_ptr<T> p) : ptr_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  template <class U, class = std::enable_if_t<std::is_base_of_v<T, U>>>
  Poly(U value) : ptr_(std::make_unique<U>(std::move(value))) {}  // NOLINT

  Poly(const Poly& other) : ptr_(other.ptr_ ? other.ptr_->clone() : nullptr) {}
  Poly(Poly&&) noexcept = default;
  Poly& operator=(const Poly& other) {
    if (this != &other) ptr_ = other.ptr_ ? other.ptr_->clone() : nullptr;
    return *this;
  }
  Poly& operator=(Poly&&) noexcept = default;

  T* operator->() const noexcept { return ptr_.get(); }
  T& operator*() const noexcept { return *ptr_; }
  explicit operator bool() const noexcept { return static_cast<bool>(ptr_); }

 private:
  std::unique_ptr<T> ptr_;
};

/// Per-operator adaptive weights. `usage` and `score_accum` cover the current
/// smoothing segment only.
struct OperatorWeights {
  std::vector<double> weights;
  std::vector<std::int64_t> usage;
  std::vector<double> score_accum;

  OperatorWeights() = default;
  explicit OperatorWeights(std::size_t n, double initial = 1.0)
      : weights(n, initial), usage(n, 0), score_accum(n, 0.0) {}
  std::size_t size() const noexcept { return weights.size(); }
};

/// Engine-maintained statistics for one operator pool.
struct PoolStats {
  OperatorWeights weights;
  std::vector<std::int64_t> calls;
  std::vector<double> cumulative_reward;
  std::deque<std::size_t> recent;

  PoolStats() = default;
  explicit PoolStats(std::size_t n) : weights(n), calls(n, 0), cumulative_reward(n, 0.0) {}
};

struct IterationRecord {
  std::size_t destroy_index = 0;
  std::size_t repair_index = 0;
  Cost delta = 0;
  bool accepted = false;
  bool new_best = false;
  std::size_t removal_size = 0;
};

struct SearchState {
  Tour current;
  Tour best;
  std::int64_t iteration = 0;
  double temperature = 0.0;
  double initial_temperature = 1.0;
  std::int64_t stagnation = 0;
  double progress = 0.0;
  PoolStats destroy;
  PoolStats repair;
};

struct OperatorPair {
  std::size_t destroy = 0;
  std::size_t repair = 0;
};

class DestroyOperator {
 public:
  virtual ~DestroyOperator() = default;
  virtual std::string name() const = 0;
  virtual PartialSolution destroy(const Tour& tour, std::size_t k, const Instance& instance,
                                  Rng& rng) const = 0;
  virtual std::unique_ptr<DestroyOperator> clone() const = 0;
};

class RepairOperator {
 public:
  virtual ~RepairOperator() = default;
  virtual std::string name() const = 0;
  virtual Tour repair(PartialSolution partial, const Instance& instance, Rng& rng) const = 0;
  virtual std::unique_ptr<RepairOperator> clone() const = 0;
};

class InitialSolution {
 public:
  virtual ~InitialSolution() = default;
  virtual std::string name() const = 0;
  virtual Tour build(const Instance& instance, Rng& rng) const = 0;
  virtual std::unique_ptr<InitialSolution> clone() const = 0;
};

class OperatorSelector {
 public:
  virtual ~OperatorSelector() = default;
  virtual std::string name() const = 0;
  virtual void reset(std::size_t /*destroy_count*/, std::size_t /*repair_count*/) {}
  virtual OperatorPair select(const SearchState& state, Rng& rng) = 0;
  /// Receives the reward the weight updater assigned to the last pair.
  virtual void feedback(const IterationRecord& /*record*/, double /*reward*/) {}
  virtual std::unique_ptr<OperatorSelector> clone() const = 0;
};

class WeightUpdater {
 public:
  virtual ~WeightUpdater() = default;
  virtual std::string name() const = 0;
  /// Updates the pool weights in `state` and returns the scalar reward
  /// credited to both operators of the pair.
  virtual double update(const IterationRecord& record, SearchState& state) = 0;
  virtual std::unique_ptr<WeightUpdater> clone() const = 0;
};

class AcceptanceCriterion {
 public:
  virtual ~AcceptanceCriterion() = default;
  virtual std::string name() const = 0;
  virtual bool accept(Cost delta, const SearchState& state, Rng& rng) = 0;
  virtual std::unique_ptr<AcceptanceCriterion> clone() const = 0;
};

class DegreeController {
 public:
  virtual ~DegreeController() = default;
  virtual std::string name() const = 0;
  virtual std::size_t degree(std::size_t n, const SearchState& state, Rng& rng) = 0;
  virtual std::unique_ptr<DegreeController> clone() const = 0;
};

/// The seven pluggable slots that define a concrete ALNS algorithm.
struct ComponentSet {
  std::vector<Poly<DestroyOperator>> destroy_pool;
  std::vector<Poly<RepairOperator>> repair_pool;
  Poly<InitialSolution> initializer;
  Poly<OperatorSelector> selector;
  Poly<WeightUpdater> weight_updater;
  Poly<AcceptanceCriterion> acceptance;
  Poly<DegreeController> degree_controller;

  /// Throws std::invalid_argument if a pool is empty or a slot is unset.
  void validate() const;
  std::string describe() const;
};

enum class Slot { destroy, repair, initializer, selector, weight_updater, acceptance, degree };

inline constexpr Slot kAllSlots[] = {Slot::destroy,        Slot::repair,     Slot::initializer,
                                     Slot::selector,       Slot::weight_updater, Slot::acceptance,
                                     Slot::degree};

std::string_view to_string(Slot slot);
/// Accepts the names produced by to_string(Slot). Throws std::invalid_argument.
Slot parse_slot(std::string_view name);

/// Copy of `base` with `slot` taken from `donor`.
ComponentSet substitute_slot(const ComponentSet& base, const ComponentSet& donor, Slot slot);

/// Throws ContractViolation unless 1 <= k <= n - 2.
void check_removal_size(std::size_t n, std::size_t k);

}  // namespace alns
