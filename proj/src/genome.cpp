#include "alns/genome.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "alns/baseline.hpp"
#include "alns/evolved.hpp"

namespace alns {
namespace {

std::vector<TaskSchema> build_schemas() {
  std::vector<TaskSchema> s;
  s.push_back({Slot::destroy,
               {"random", "worst", "shaw", "string", "long_edge", "cluster"},
               {{"worst_p", 1.0, 20.0, 6.0, false},
                {"shaw_p", 1.0, 20.0, 6.0, false},
                {"long_edge_exponent", 0.0, 12.0, 4.0, false}}});
  s.push_back({Slot::repair,
               {"greedy", "regret", "hybrid"},
               {{"regret_order", 2.0, 3.0, 2.0, true},
                {"regret_weight", 0.0, 3.0, 1.5, false},
                {"cost_weight", 0.0, 1.0, 0.25, false}}});
  s.push_back({Slot::initializer,
               {"random_permutation", "nearest_neighbor", "multi_start_nn"},
               {{"starts", 1.0, 32.0, 8.0, true}}});
  s.push_back({Slot::selector,
               {"roulette", "bandit"},
               {{"c_ucb", 0.0, 2.0, 0.5, false},
                {"rho", 0.05, 1.0, 0.5, false},
                {"momentum_decay", 0.0, 0.99, 0.8, false}}});
  s.push_back({Slot::weight_updater,
               {"classic", "risk_adjusted"},
               {{"reaction_factor", 0.01, 1.0, 0.45, false},
                {"score_best", 0.0, 50.0, 33.0, false},
                {"score_improve", 0.0, 50.0, 9.0, false},
                {"score_accept", 0.0, 50.0, 13.0, false},
                {"segment_length", 10.0, 500.0, 100.0, true},
                {"reward_best", 0.01, 2.0, 1.0, false},
                {"reward_improve", 0.01, 2.0, 0.5, false},
                {"lambda_min", 0.0, 2.0, 0.1, false},
                {"lambda_max", 0.0, 2.0, 1.0, false},
                {"eta", 0.01, 1.0, 0.6, false}}});
  s.push_back({Slot::acceptance,
               {"sa", "tolerance"},
               {{"kappa", 0.0, 2.0, 0.3, false}, {"window", 1.0, 200.0, 50.0, true}}});
  s.push_back({Slot::degree,
               {"uniform", "fixed", "adaptive"},
               {{"range_min", 0.01, 0.9, 0.1, false},
                {"range_max", 0.01, 0.9, 0.4, false},
                {"ratio", 0.01, 0.9, 0.5, false},
                {"d_min", 0.01, 0.9, 0.08, false},
                {"d_max", 0.01, 0.9, 0.45, false},
                {"stagnation_threshold", 0.0, 500.0, 50.0, true},
                {"stagnation_boost", 0.0, 0.5, 0.1, false}}});
  return s;
}

double get(const Genome& g, const char* name) { return g.params.at(name); }

}  // namespace

double ParamSpec::clamp(double v) const {
  if (integer) v = std::round(v);
  return std::clamp(v, lo, hi);
}

bool TaskSchema::has_family(const std::string& family) const {
  return std::find(families.begin(), families.end(), family) != families.end();
}

const ParamSpec* TaskSchema::find(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const TaskSchema& schema_for(Slot task) {
  static const std::vector<TaskSchema> schemas = build_schemas();
  for (const auto& s : schemas) {
    if (s.task == task) return s;
  }
  throw std::logic_error("no schema for task");
}

void Genome::validate() const {
  if (schema_version != kGenomeSchemaVersion) {
    throw std::invalid_argument("unsupported genome schema version " + std::to_string(schema_version));
  }
  const TaskSchema& schema = schema_for(task);
  if (!schema.has_family(family)) {
    throw std::invalid_argument("family '" + family + "' is not valid for task '" + std::string(to_string(task)) + "'");
  }
  for (const auto& spec : schema.params) {
    const auto it = params.find(spec.name);
    if (it == params.end()) throw std::invalid_argument("missing parameter '" + spec.name + "'");
    const double v = it->second;
    if (!std::isfinite(v) || v < spec.lo || v > spec.hi) {
      throw std::invalid_argument("parameter '" + spec.name + "' = " + std::to_string(v) + " outside [" +
                                  std::to_string(spec.lo) + ", " + std::to_string(spec.hi) + "]");
    }
    if (spec.integer && v != std::round(v)) {
      throw std::invalid_argument("parameter '" + spec.name + "' must be an integer");
    }
  }
  for (const auto& [name, value] : params) {
    if (!schema.find(name)) throw std::invalid_argument("unknown parameter '" + name + "'");
  }
}

bool Genome::valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

nlohmann::json Genome::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["id"] = id;
  j["task"] = std::string(to_string(task));
  j["family"] = family;
  j["params"] = params;
  j["lineage"] = lineage;
  return j;
}

Genome Genome::from_json(const nlohmann::json& j) {
  Genome g;
  g.schema_version = j.value("schema_version", kGenomeSchemaVersion);
  g.id = j.value("id", std::string{});
  g.task = parse_slot(j.at("task").get<std::string>());
  g.family = j.at("family").get<std::string>();
  for (const auto& [name, value] : j.at("params").items()) {
    if (!value.is_number()) throw std::invalid_argument("parameter '" + name + "' is not a number");
    g.params[name] = value.get<double>();
  }
  if (j.contains("lineage")) g.lineage = j.at("lineage").get<std::vector<std::string>>();
  return g;
}

Genome default_genome(Slot task, const std::string& family) {
  const TaskSchema& schema = schema_for(task);
  if (!schema.has_family(family)) throw std::invalid_argument("unknown family '" + family + "'");
  Genome g;
  g.task = task;
  g.family = family;
  g.id = std::string(to_string(task)) + "-" + family + "-default";
  for (const auto& p : schema.params) g.params[p.name] = p.initial;
  return g;
}

Genome seed_genome(Slot task) {
  static constexpr std::pair<Slot, const char*> families[] = {
      {Slot::destroy, "random"},   {Slot::repair, "greedy"},         {Slot::initializer, "random_permutation"},
      {Slot::selector, "roulette"}, {Slot::weight_updater, "classic"}, {Slot::acceptance, "sa"},
      {Slot::degree, "uniform"}};
  for (const auto& [slot, family] : families) {
    if (slot == task) {
      Genome g = default_genome(task, family);
      g.id = std::string(to_string(task)) + "-seed";
      return g;
    }
  }
  throw std::logic_error("no seed genome for task");
}

Genome evolved_genome(Slot task) {
  static constexpr std::pair<Slot, const char*> families[] = {
      {Slot::destroy, "cluster"}, {Slot::repair, "hybrid"},             {Slot::initializer, "multi_start_nn"},
      {Slot::selector, "bandit"},  {Slot::weight_updater, "risk_adjusted"}, {Slot::acceptance, "tolerance"},
      {Slot::degree, "adaptive"}};
  for (const auto& [slot, family] : families) {
    if (slot == task) return default_genome(task, family);
  }
  throw std::logic_error("no evolved genome for task");
}

std::string make_genome_id(Slot task, Rng& rng) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng.next()));
  return std::string(to_string(task)) + "-" + buf;
}

Genome mutate(const Genome& parent, const MutationParams& params, Rng& rng) {
  const TaskSchema& schema = schema_for(parent.task);
  Genome child = parent;
  for (const auto& spec : schema.params) {
    if (!rng.bernoulli(params.param_rate)) continue;
    const double noise = rng.normal() * params.noise_scale * spec.range();
    child.params[spec.name] = spec.clamp(parent.params.at(spec.name) + noise);
  }
  if (schema.families.size() > 1 && rng.bernoulli(params.family_flip_rate)) {
    std::vector<std::string> others;
    for (const auto& f : schema.families) {
      if (f != parent.family) others.push_back(f);
    }
    child.family = others[static_cast<std::size_t>(rng.below(others.size()))];
  }
  child.id = make_genome_id(child.task, rng);
  child.lineage = {parent.id};
  return child;
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
  if (a.task != b.task) throw std::invalid_argument("crossover between genomes of different tasks");
  Genome child = a;
  for (const auto& spec : schema_for(a.task).params) {
    child.params[spec.name] = rng.bernoulli(0.5) ? a.params.at(spec.name) : b.params.at(spec.name);
  }
  child.family = rng.bernoulli(0.5) ? a.family : b.family;
  child.id = make_genome_id(child.task, rng);
  child.lineage = {a.id, b.id};
  return child;
}

void apply_genome(ComponentSet& set, const Genome& g) {
  g.validate();
  const std::string& f = g.family;
  switch (g.task) {
    case Slot::destroy: {
      Poly<DestroyOperator> op;
      if (f == "random") op = RandomDestroy{};
      else if (f == "worst") op = WorstDestroy{get(g, "worst_p")};
      else if (f == "shaw") op = ShawDestroy{get(g, "shaw_p")};
      else if (f == "string") op = StringDestroy{};
      else if (f == "long_edge") op = LongEdgeDestroy{get(g, "long_edge_exponent")};
      else op = ClusterDestroy{};
      set.destroy_pool = {op};
      break;
    }
    case Slot::repair: {
      const int order = static_cast<int>(get(g, "regret_order"));
      InsertionRule rule = InsertionRule::greedy();
      if (f == "regret") rule = InsertionRule::regret(order);
      if (f == "hybrid") rule = InsertionRule{order, get(g, "regret_weight"), get(g, "cost_weight")};
      set.repair_pool = {InsertionRepair{f == "regret" ? "regret" + std::to_string(order) : f, rule}};
      break;
    }
    case Slot::initializer:
      if (f == "random_permutation") set.initializer = RandomPermutationInit{};
      else if (f == "nearest_neighbor") set.initializer = NearestNeighborInit{};
      else set.initializer = MultiStartInit{static_cast<std::size_t>(get(g, "starts"))};
      break;
    case Slot::selector:
      if (f == "roulette") {
        set.selector = RouletteSelector{};
      } else {
        set.selector = BanditSelector{BanditParams{get(g, "c_ucb"), get(g, "rho"), get(g, "momentum_decay"), 1.0}};
      }
      break;
    case Slot::weight_updater:
      if (f == "classic") {
        set.weight_updater = ClassicWeightUpdater{{get(g, "score_best"), get(g, "score_improve"), get(g, "score_accept")},
                                                  get(g, "reaction_factor"),
                                                  static_cast<std::int64_t>(get(g, "segment_length"))};
      } else {
        RiskAdjustParams p;
        p.reward_best = get(g, "reward_best");
        p.reward_improve = get(g, "reward_improve");
        p.lambda_min = std::min(get(g, "lambda_min"), get(g, "lambda_max"));
        p.lambda_max = std::max(get(g, "lambda_min"), get(g, "lambda_max"));
        p.eta = get(g, "eta");
        set.weight_updater = RiskAdjustedUpdater{p};
      }
      break;
    case Slot::acceptance:
      if (f == "sa") {
        set.acceptance = SimulatedAnnealing{};
      } else {
        set.acceptance = ToleranceAcceptance{
            ToleranceParams{get(g, "kappa"), static_cast<std::int64_t>(get(g, "window"))}};
      }
      break;
    case Slot::degree:
      if (f == "uniform") {
        const double lo = std::min(get(g, "range_min"), get(g, "range_max"));
        const double hi = std::max(get(g, "range_min"), get(g, "range_max"));
        set.degree_controller = UniformDegree{lo, hi};
      } else if (f == "fixed") {
        set.degree_controller = FixedDegree{get(g, "ratio")};
      } else {
        DegreeControlParams p;
        p.d_min = std::min(get(g, "d_min"), get(g, "d_max"));
        p.d_max = std::max(get(g, "d_min"), get(g, "d_max"));
        p.stagnation_threshold = static_cast<std::int64_t>(get(g, "stagnation_threshold"));
        p.stagnation_boost = get(g, "stagnation_boost");
        set.degree_controller = AdaptiveDegree{p};
      }
      break;
  }
}

}  // namespace alns
