#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "alns/components.hpp"
#include "alns/rng.hpp"

namespace alns {

inline constexpr int kGenomeSchemaVersion = 1;

struct ParamSpec {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  double initial = 0.0;
  bool integer = false;

  double range() const noexcept { return hi - lo; }
  double clamp(double v) const;
};

/// Families and parameter bounds available to one component task.
struct TaskSchema {
  Slot task = Slot::destroy;
  std::vector<std::string> families;
  std::vector<ParamSpec> params;

  bool has_family(const std::string& family) const;
  const ParamSpec* find(const std::string& name) const;
};

const TaskSchema& schema_for(Slot task);

/// A parameterised component: the unit of variation during evolution.
/// `params` always holds every parameter of the task schema; the family
/// decides which of them are read.
struct Genome {
  int schema_version = kGenomeSchemaVersion;
  std::string id;
  Slot task = Slot::destroy;
  std::string family;
  std::map<std::string, double> params;
  std::vector<std::string> lineage;

  /// Throws std::invalid_argument naming the first violation.
  void validate() const;
  bool valid() const noexcept;

  nlohmann::json to_json() const;
  static Genome from_json(const nlohmann::json& j);
};

/// Genome with every parameter at its schema default.
Genome default_genome(Slot task, const std::string& family);

/// Weak starting point of each task: random-permutation init, random
/// destroy, uniform degree range, greedy repair, classic weights, simulated
/// annealing and roulette selection.
Genome seed_genome(Slot task);

/// Genome matching the component used by the evolved set for `task`.
Genome evolved_genome(Slot task);

struct MutationParams {
  double param_rate = 0.3;
  /// Gaussian sigma as a fraction of each parameter's range.
  double noise_scale = 0.1;
  double family_flip_rate = 0.1;
};

Genome mutate(const Genome& parent, const MutationParams& params, Rng& rng);
/// Uniform parameter crossover; family from a random parent. Throws on task
/// mismatch.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);

/// Fresh identifier of the form "<task>-<16 hex digits>".
std::string make_genome_id(Slot task, Rng& rng);

/// Installs the component described by `genome` into its slot of `set`.
/// Pool tasks replace the whole pool with the single operator.
void apply_genome(ComponentSet& set, const Genome& genome);

}  // namespace alns
