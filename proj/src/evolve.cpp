#include "alns/evolve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

#include "alns/log.hpp"

namespace alns {
namespace fs = std::filesystem;
namespace {

Elite evaluate_elite(const Evaluator& evaluator, const Genome& genome, std::uint64_t seed, int* failures) {
  Evaluation ev = evaluator.evaluate(genome, seed);
  if (!ev.error.empty()) {
    log_warning("evaluation of " + genome.id + " failed: " + ev.error);
    if (failures) ++*failures;
  }
  return Elite{genome, ev.quality, std::move(ev.descriptor)};
}

std::string generation_dir_name(int generation) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%06d", generation);
  return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

// Completed snapshots, oldest first. A snapshot counts once its state file exists.
std::vector<fs::path> list_checkpoints(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("gen_", 0) == 0 &&
        fs::exists(entry.path() / "state.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void save_checkpoint(const EvolveConfig& config, const EvolveResult& state, int generation) {
  const fs::path dir = *config.checkpoint_dir / generation_dir_name(generation);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < state.archives.size(); ++i) {
    write_json(dir / ("island_" + std::to_string(i) + ".json"), state.archives[i].to_json());
  }
  write_json(dir / "state.json", {{"task", std::string(to_string(config.task))},
                                  {"seed", config.seed},
                                  {"generation", generation},
                                  {"islands", state.archives.size()},
                                  {"best_history", state.best_history},
                                  {"evaluation_failures", state.evaluation_failures},
                                  {"seed_elite", state.seed.to_json()}});
  auto all = list_checkpoints(*config.checkpoint_dir);
  while (static_cast<int>(all.size()) > config.keep_checkpoints) {
    fs::remove_all(all.front());
    all.erase(all.begin());
  }
}

// Restores the newest snapshot; returns the generation it completed or -1.
int load_checkpoint(const EvolveConfig& config, EvolveResult& state) {
  const auto all = list_checkpoints(*config.checkpoint_dir);
  if (all.empty()) return -1;
  const fs::path dir = all.back();
  const auto meta = read_json(dir / "state.json");
  if (meta.at("task").get<std::string>() != to_string(config.task) ||
      meta.at("seed").get<std::uint64_t>() != config.seed ||
      meta.at("islands").get<std::size_t>() != static_cast<std::size_t>(config.island_count())) {
    throw std::runtime_error("checkpoint in " + dir.string() + " belongs to a different run");
  }
  state.archives.clear();
  for (int i = 0; i < config.island_count(); ++i) {
    state.archives.push_back(EliteArchive::from_json(read_json(dir / ("island_" + std::to_string(i) + ".json"))));
  }
  state.best_history = meta.at("best_history").get<std::vector<double>>();
  state.evaluation_failures = meta.at("evaluation_failures").get<int>();
  state.seed = Elite::from_json(meta.at("seed_elite"));
  return meta.at("generation").get<int>();
}

const Elite& global_best(const std::vector<EliteArchive>& archives) {
  const Elite* best = nullptr;
  for (const auto& a : archives) {
    if (a.empty()) continue;
    const Elite& e = a.best();
    if (!best || e.quality > best->quality) best = &e;
  }
  if (!best) throw std::logic_error("all archives are empty");
  return *best;
}

nlohmann::json parent_context(const Elite& parent, const EliteArchive& archive, int generation) {
  nlohmann::json top = nlohmann::json::array();
  const auto ranked = archive.ranked();
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    top.push_back({{"family", ranked[i]->genome.family}, {"quality", ranked[i]->quality}});
  }
  return {{"generation", generation},
          {"parent_quality", parent.quality},
          {"parent_descriptor", parent.descriptor},
          {"archive_size", archive.size()},
          {"top_elites", top}};
}

}  // namespace

int EvolveConfig::island_count() const {
  if (islands > 0) return islands;
  return task == Slot::initializer ? 4 : 2;
}

std::size_t EvolveConfig::archive_capacity() const {
  if (capacity > 0) return capacity;
  return task == Slot::initializer ? 50 : 20;
}

void EvolveConfig::validate() const {
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (islands < 0) throw std::invalid_argument("islands must be >= 0");
  if (!(exploit_prob >= 0.0 && exploit_prob <= 1.0)) throw std::invalid_argument("exploit_prob must lie in [0, 1]");
  if (migration_interval < 1) throw std::invalid_argument("migration_interval must be >= 1");
  if (!(migration_rate > 0.0 && migration_rate <= 1.0)) {
    throw std::invalid_argument("migration_rate must lie in (0, 1]");
  }
  if (keep_checkpoints < 1) throw std::invalid_argument("keep_checkpoints must be >= 1");
}

std::uint64_t evaluation_seed(std::uint64_t master_seed) { return derive_seed(master_seed, "evaluator"); }

EvolveResult evolve_task(const EvolveConfig& config, const Evaluator& evaluator, Proposer& proposer,
                         const ProgressFn& progress) {
  config.validate();
  if (evaluator.spec().task != config.task) throw std::invalid_argument("evaluator task does not match");
  const int n_islands = config.island_count();
  const std::uint64_t eval_seed = evaluation_seed(config.seed);
  const Rng root = Rng(config.seed).fork("islands");

  EvolveResult state;
  int start = 0;
  if (config.checkpoint_dir) {
    fs::create_directories(*config.checkpoint_dir);
    const int done = load_checkpoint(config, state);
    if (done >= 0) {
      start = done + 1;
      state.resumed_from = done;
      log_info("resuming " + std::string(to_string(config.task)) + " evolution after generation " +
               std::to_string(done));
    }
  }
  if (start == 0) {
    state.seed = evaluate_elite(evaluator, seed_genome(config.task), eval_seed, &state.evaluation_failures);
    state.archives.assign(static_cast<std::size_t>(n_islands),
                          EliteArchive(grid_for(config.task), config.archive_capacity()));
    for (auto& a : state.archives) a.insert(state.seed);
  }

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int threads = std::clamp(config.threads > 0 ? config.threads : hw, 1, n_islands);

  for (int gen = start; gen < config.generations; ++gen) {
    std::vector<Elite> children(static_cast<std::size_t>(n_islands));
    std::vector<int> failures(static_cast<std::size_t>(n_islands), 0);
    const auto step = [&](int i) {
      Rng rng = root.fork(static_cast<std::uint64_t>(i)).fork(static_cast<std::uint64_t>(gen));
      const EliteArchive& archive = state.archives[static_cast<std::size_t>(i)];
      const ParentChoice parents = select_parent(archive, rng, config.exploit_prob);
      Genome child = parents.mode == ParentMode::exploit
                         ? proposer.propose(parents.first->genome, parent_context(*parents.first, archive, gen), rng)
                         : crossover(parents.first->genome, parents.second->genome, rng);
      children[static_cast<std::size_t>(i)] =
          evaluate_elite(evaluator, child, eval_seed, &failures[static_cast<std::size_t>(i)]);
    };
    if (threads == 1) {
      for (int i = 0; i < n_islands; ++i) step(i);
    } else {
      for (int first = 0; first < n_islands; first += threads) {
        std::vector<std::jthread> pool;
        for (int i = first; i < std::min(n_islands, first + threads); ++i) pool.emplace_back(step, i);
      }
    }
    for (int i = 0; i < n_islands; ++i) {
      state.archives[static_cast<std::size_t>(i)].insert(children[static_cast<std::size_t>(i)]);
      state.evaluation_failures += failures[static_cast<std::size_t>(i)];
    }
    if ((gen + 1) % config.migration_interval == 0) migrate(state.archives, config.migration_rate);

    state.best_history.push_back(global_best(state.archives).quality);
    if (config.checkpoint_dir) save_checkpoint(config, state, gen);
    if (progress) progress(gen, state.best_history.back());
  }

  state.generations_done = config.generations;
  state.best = global_best(state.archives);
  return state;
}

}  // namespace alns
