#include "alns/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>

namespace alns {
namespace fs = std::filesystem;
namespace {

std::string interpolate_string(const std::string& s) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find("${", pos);
    if (open == std::string::npos) break;
    const auto close = s.find('}', open + 2);
    if (close == std::string::npos) throw ConfigError("unterminated ${ in '" + s + "'");
    const std::string name = s.substr(open + 2, close - open - 2);
    const char* value = std::getenv(name.c_str());
    if (!value) throw ConfigError("environment variable " + name + " is not set");
    out += s.substr(pos, open - pos);
    out += value;
    pos = close + 1;
  }
  return out + s.substr(pos);
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_path(const nlohmann::json& j, const char* key, fs::path& field, const fs::path& base) {
  if (!j.contains(key)) return;
  fs::path p = j.at(key).get<std::string>();
  field = p.is_relative() && !base.empty() ? base / p : p;
}

void read_engine(const nlohmann::json& j, EngineParams& e, const std::string& where) {
  check_keys(j, {"initial_temperature", "cooling_rate"}, where);
  read(j, "initial_temperature", e.initial_temperature, where);
  read(j, "cooling_rate", e.cooling_rate, where);
}

template <class F>
void wrap(const std::string& what, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

nlohmann::json interpolate_env(const nlohmann::json& j) {
  if (j.is_string()) return interpolate_string(j.get<std::string>());
  if (j.is_array() || j.is_object()) {
    nlohmann::json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = interpolate_env(*it);
    return out;
  }
  return j;
}

Config Config::defaults(const fs::path& data_dir) {
  Config c;
  c.paths.instances_dir = data_dir / "tsplib";
  c.paths.bks_file = data_dir / "bks.txt";
  c.paths.sets_file = data_dir / "benchmark_sets.txt";
  return c;
}

Config Config::load(const fs::path& file, const fs::path& data_dir) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + file.string() + ": " + e.what());
  }
  return from_json(j, data_dir, fs::absolute(file).parent_path());
}

Config Config::from_json(const nlohmann::json& raw, const fs::path& data_dir, const fs::path& base_dir) {
  const nlohmann::json j = interpolate_env(raw);
  Config c = defaults(data_dir);
  check_keys(j, {"seed", "paths", "baseline", "evolved", "evaluation", "evolve", "bench", "proposer"}, "config");
  read(j, "seed", c.seed, "config");

  if (j.contains("paths")) {
    const auto& p = j["paths"];
    check_keys(p, {"instances_dir", "bks_file", "sets_file", "output_dir"}, "paths");
    read_path(p, "instances_dir", c.paths.instances_dir, base_dir);
    read_path(p, "bks_file", c.paths.bks_file, base_dir);
    read_path(p, "sets_file", c.paths.sets_file, base_dir);
    read_path(p, "output_dir", c.paths.output_dir, base_dir);
  }
  if (j.contains("baseline")) {
    const auto& b = j["baseline"];
    const std::string w = "baseline";
    check_keys(b, {"initial_temperature", "cooling_rate", "reaction_factor", "destruction_ratio",
                   "shaw_randomization", "worst_randomization", "scores", "segment_length"},
               w);
    read(b, "initial_temperature", c.baseline.initial_temperature, w);
    read(b, "cooling_rate", c.baseline.cooling_rate, w);
    read(b, "reaction_factor", c.baseline.reaction_factor, w);
    read(b, "destruction_ratio", c.baseline.destruction_ratio, w);
    read(b, "shaw_randomization", c.baseline.shaw_randomization, w);
    read(b, "worst_randomization", c.baseline.worst_randomization, w);
    read(b, "scores", c.baseline.scores, w);
    read(b, "segment_length", c.baseline.segment_length, w);
  }
  if (j.contains("evolved")) {
    const auto& e = j["evolved"];
    const std::string w = "evolved";
    check_keys(e, {"initial_temperature", "cooling_rate", "long_edge_exponent", "init_starts", "bandit", "risk",
                   "tolerance", "degree"},
               w);
    read(e, "initial_temperature", c.evolved.initial_temperature, w);
    read(e, "cooling_rate", c.evolved.cooling_rate, w);
    read(e, "long_edge_exponent", c.evolved.long_edge_exponent, w);
    read(e, "init_starts", c.evolved.init_starts, w);
    if (e.contains("bandit")) {
      const auto& x = e["bandit"];
      check_keys(x, {"c_ucb", "rho", "momentum_decay", "prior"}, "evolved.bandit");
      read(x, "c_ucb", c.evolved.bandit.c_ucb, w);
      read(x, "rho", c.evolved.bandit.rho, w);
      read(x, "momentum_decay", c.evolved.bandit.momentum_decay, w);
      read(x, "prior", c.evolved.bandit.prior, w);
    }
    if (e.contains("risk")) {
      const auto& x = e["risk"];
      check_keys(x, {"reward_best", "reward_improve", "lambda_min", "lambda_max", "eta", "weight_floor"},
                 "evolved.risk");
      read(x, "reward_best", c.evolved.risk.reward_best, w);
      read(x, "reward_improve", c.evolved.risk.reward_improve, w);
      read(x, "lambda_min", c.evolved.risk.lambda_min, w);
      read(x, "lambda_max", c.evolved.risk.lambda_max, w);
      read(x, "eta", c.evolved.risk.eta, w);
      read(x, "weight_floor", c.evolved.risk.weight_floor, w);
    }
    if (e.contains("tolerance")) {
      const auto& x = e["tolerance"];
      check_keys(x, {"kappa", "window"}, "evolved.tolerance");
      read(x, "kappa", c.evolved.tolerance.kappa, w);
      read(x, "window", c.evolved.tolerance.window, w);
    }
    if (e.contains("degree")) {
      const auto& x = e["degree"];
      check_keys(x, {"d_min", "d_max", "stagnation_threshold", "stagnation_boost", "jitter_lo", "jitter_hi"},
                 "evolved.degree");
      read(x, "d_min", c.evolved.degree.d_min, w);
      read(x, "d_max", c.evolved.degree.d_max, w);
      read(x, "stagnation_threshold", c.evolved.degree.stagnation_threshold, w);
      read(x, "stagnation_boost", c.evolved.degree.stagnation_boost, w);
      read(x, "jitter_lo", c.evolved.degree.jitter_lo, w);
      read(x, "jitter_hi", c.evolved.degree.jitter_hi, w);
    }
  }
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    const std::string w = "evaluation";
    check_keys(e, {"instances", "iterations", "seeds_per_instance", "time_scale", "engine"}, w);
    read(e, "instances", c.evaluation.instances, w);
    read(e, "iterations", c.evaluation.iterations, w);
    read(e, "seeds_per_instance", c.evaluation.seeds_per_instance, w);
    read(e, "time_scale", c.evaluation.time_scale, w);
    if (e.contains("engine")) read_engine(e["engine"], c.evaluation.engine, "evaluation.engine");
  }
  if (j.contains("evolve")) {
    const auto& e = j["evolve"];
    const std::string w = "evolve";
    check_keys(e, {"generations", "islands", "capacity", "exploit_prob", "migration_interval", "migration_rate",
                   "keep_checkpoints", "threads", "mutation"},
               w);
    read(e, "generations", c.evolve.generations, w);
    read(e, "islands", c.evolve.islands, w);
    read(e, "capacity", c.evolve.capacity, w);
    read(e, "exploit_prob", c.evolve.exploit_prob, w);
    read(e, "migration_interval", c.evolve.migration_interval, w);
    read(e, "migration_rate", c.evolve.migration_rate, w);
    read(e, "keep_checkpoints", c.evolve.keep_checkpoints, w);
    read(e, "threads", c.evolve.threads, w);
    if (e.contains("mutation")) {
      const auto& m = e["mutation"];
      check_keys(m, {"param_rate", "noise_scale", "family_flip_rate"}, "evolve.mutation");
      read(m, "param_rate", c.evolve.mutation.param_rate, w);
      read(m, "noise_scale", c.evolve.mutation.noise_scale, w);
      read(m, "family_flip_rate", c.evolve.mutation.family_flip_rate, w);
    }
  }
  if (j.contains("bench")) {
    const auto& b = j["bench"];
    const std::string w = "bench";
    check_keys(b, {"setting", "instances", "repetitions", "threads", "variants"}, w);
    read(b, "setting", c.bench.setting, w);
    read(b, "instances", c.bench.instances, w);
    read(b, "repetitions", c.bench.repetitions, w);
    read(b, "threads", c.bench.threads, w);
    read(b, "variants", c.bench.variants, w);
  }
  if (j.contains("proposer")) {
    const auto& p = j["proposer"];
    const std::string w = "proposer";
    check_keys(p, {"mode", "endpoint", "model", "temperature", "api_key_env", "max_retries", "timeout_seconds"}, w);
    read(p, "mode", c.proposer.mode, w);
    read(p, "endpoint", c.proposer.llm.base_url, w);
    read(p, "model", c.proposer.llm.model, w);
    read(p, "temperature", c.proposer.llm.temperature, w);
    read(p, "api_key_env", c.proposer.llm.api_key_env, w);
    read(p, "max_retries", c.proposer.llm.max_retries, w);
    read(p, "timeout_seconds", c.proposer.llm.timeout_seconds, w);
  }
  return c;
}

void Config::validate() const {
  for (const auto& [what, p] : {std::pair{"instances_dir", paths.instances_dir}, std::pair{"bks_file", paths.bks_file},
                                std::pair{"sets_file", paths.sets_file}}) {
    if (!fs::exists(p)) throw ConfigError(std::string("paths.") + what + " does not exist: " + p.string());
  }
  wrap("baseline", [&] { baseline.validate(); });
  wrap("evolved", [&] { evolved.validate(); });
  wrap("evolve", [&] { evolve.validate(); });
  wrap("evaluation.engine", [&] { evaluation.engine.validate(); });
  if (evaluation.iterations < 1) throw ConfigError("evaluation.iterations must be >= 1");
  if (evaluation.seeds_per_instance < 1) throw ConfigError("evaluation.seeds_per_instance must be >= 1");
  if (!(evaluation.time_scale > 0.0)) throw ConfigError("evaluation.time_scale must be positive");
  if (bench.repetitions < 1) throw ConfigError("bench.repetitions must be >= 1");
  if (bench.variants.empty()) throw ConfigError("bench.variants is empty");
  if (proposer.mode != "mutate" && proposer.mode != "llm") {
    throw ConfigError("proposer.mode must be 'mutate' or 'llm', got '" + proposer.mode + "'");
  }
  if (proposer.mode == "llm") wrap("proposer", [&] { proposer.llm.validate(); });
}

nlohmann::json Config::to_json() const {
  const auto& b = baseline;
  const auto& e = evolved;
  return {
      {"seed", seed},
      {"paths",
       {{"instances_dir", paths.instances_dir.string()},
        {"bks_file", paths.bks_file.string()},
        {"sets_file", paths.sets_file.string()},
        {"output_dir", paths.output_dir.string()}}},
      {"baseline",
       {{"initial_temperature", b.initial_temperature},
        {"cooling_rate", b.cooling_rate},
        {"reaction_factor", b.reaction_factor},
        {"destruction_ratio", b.destruction_ratio},
        {"shaw_randomization", b.shaw_randomization},
        {"worst_randomization", b.worst_randomization},
        {"scores", b.scores},
        {"segment_length", b.segment_length}}},
      {"evolved",
       {{"initial_temperature", e.initial_temperature},
        {"cooling_rate", e.cooling_rate},
        {"long_edge_exponent", e.long_edge_exponent},
        {"init_starts", e.init_starts},
        {"bandit",
         {{"c_ucb", e.bandit.c_ucb},
          {"rho", e.bandit.rho},
          {"momentum_decay", e.bandit.momentum_decay},
          {"prior", e.bandit.prior}}},
        {"risk",
         {{"reward_best", e.risk.reward_best},
          {"reward_improve", e.risk.reward_improve},
          {"lambda_min", e.risk.lambda_min},
          {"lambda_max", e.risk.lambda_max},
          {"eta", e.risk.eta},
          {"weight_floor", e.risk.weight_floor}}},
        {"tolerance", {{"kappa", e.tolerance.kappa}, {"window", e.tolerance.window}}},
        {"degree",
         {{"d_min", e.degree.d_min},
          {"d_max", e.degree.d_max},
          {"stagnation_threshold", e.degree.stagnation_threshold},
          {"stagnation_boost", e.degree.stagnation_boost},
          {"jitter_lo", e.degree.jitter_lo},
          {"jitter_hi", e.degree.jitter_hi}}}}},
      {"evaluation",
       {{"instances", evaluation.instances},
        {"iterations", evaluation.iterations},
        {"seeds_per_instance", evaluation.seeds_per_instance},
        {"time_scale", evaluation.time_scale},
        {"engine",
         {{"initial_temperature", evaluation.engine.initial_temperature},
          {"cooling_rate", evaluation.engine.cooling_rate}}}}},
      {"evolve",
       {{"generations", evolve.generations},
        {"islands", evolve.islands},
        {"capacity", evolve.capacity},
        {"exploit_prob", evolve.exploit_prob},
        {"migration_interval", evolve.migration_interval},
        {"migration_rate", evolve.migration_rate},
        {"keep_checkpoints", evolve.keep_checkpoints},
        {"threads", evolve.threads},
        {"mutation",
         {{"param_rate", evolve.mutation.param_rate},
          {"noise_scale", evolve.mutation.noise_scale},
          {"family_flip_rate", evolve.mutation.family_flip_rate}}}}},
      {"bench",
       {{"setting", bench.setting},
        {"instances", bench.instances},
        {"repetitions", bench.repetitions},
        {"threads", bench.threads},
        {"variants", bench.variants}}},
      {"proposer",
       {{"mode", proposer.mode},
        {"endpoint", proposer.llm.base_url},
        {"model", proposer.llm.model},
        {"temperature", proposer.llm.temperature},
        {"api_key_env", proposer.llm.api_key_env},
        {"max_retries", proposer.llm.max_retries},
        {"timeout_seconds", proposer.llm.timeout_seconds}}}};
}

}  // namespace alns
