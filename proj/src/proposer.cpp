#include "alns/proposer.hpp"

#include <cstdlib>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "alns/log.hpp"

namespace alns {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // request path
};

Endpoint parse_endpoint(const std::string& base_url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) throw std::invalid_argument("malformed endpoint URL: " + base_url);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix + "/chat/completions"};
}

std::string describe_schema(Slot task) {
  const TaskSchema& schema = schema_for(task);
  std::ostringstream out;
  out << "families: ";
  for (std::size_t i = 0; i < schema.families.size(); ++i) out << (i ? ", " : "") << schema.families[i];
  out << "\nparameters:\n";
  for (const auto& p : schema.params) {
    out << "  - " << p.name << ": " << (p.integer ? "integer" : "real") << " in [" << p.lo << ", " << p.hi
        << "]\n";
  }
  return out.str();
}

}  // namespace

void LlmConfig::validate() const {
  if (base_url.empty()) throw std::invalid_argument("LLM proposer needs an endpoint URL");
  if (model.empty()) throw std::invalid_argument("LLM proposer needs a model name");
  parse_endpoint(base_url);
  if (!(temperature >= 0.0)) throw std::invalid_argument("sampling temperature must be >= 0");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (timeout_seconds <= 0) throw std::invalid_argument("timeout must be positive");
}

std::string build_prompt(const Genome& parent, const nlohmann::json& context) {
  const std::string task(to_string(parent.task));
  std::ostringstream out;
  out << "ROLE\n"
      << "You are an expert in adaptive large neighborhood search for the travelling salesman problem. "
      << "You design one component of the search at a time.\n\n"
      << "TASK\n"
      << "Propose an improved configuration of the '" << task << "' component. It is evaluated in isolation: "
      << "every other component is fixed to a classic implementation, and the score rewards low optimality gaps"
      << (parent.task == Slot::destroy || parent.task == Slot::repair ? " and stable results across instances"
                                                                       : "")
      << ".\n\n"
      << "CONSTRAINTS\n"
      << "- Reply with exactly one fenced ```json block containing a complete genome object with the keys "
      << "schema_version, task, family, params.\n"
      << "- task must be \"" << task << "\"; schema_version must be " << kGenomeSchemaVersion << ".\n"
      << "- family and every parameter must respect the schema below; all parameters must be present.\n"
      << describe_schema(parent.task) << "\n"
      << "PARENT GENOME\n```json\n"
      << parent.to_json().dump(2) << "\n```\n\n"
      << "METRICS HISTORY\n```json\n"
      << context.dump(2) << "\n```\n";
  return out.str();
}

std::optional<Genome> parse_genome_reply(const std::string& reply, Slot task, std::string* error) {
  const auto fail = [&](std::string msg) -> std::optional<Genome> {
    if (error) *error = std::move(msg);
    return std::nullopt;
  };
  const auto open = reply.find("```json");
  if (open == std::string::npos) return fail("reply has no ```json block");
  const auto body = open + 7;
  const auto close = reply.find("```", body);
  if (close == std::string::npos) return fail("unterminated ```json block");
  try {
    Genome g = Genome::from_json(nlohmann::json::parse(reply.substr(body, close - body)));
    if (g.task != task) return fail("reply targets task '" + std::string(to_string(g.task)) + "'");
    g.validate();
    return g;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

LlmProposer::LlmProposer(LlmConfig config, MutationParams fallback)
    : config_(std::move(config)), fallback_(fallback) {
  config_.validate();
}

std::string LlmProposer::request(const std::string& prompt) const {
  const Endpoint ep = parse_endpoint(config_.base_url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  const auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("endpoint returned HTTP " + std::to_string(res->status));
  const auto reply = nlohmann::json::parse(res->body);
  return reply.at("choices").at(0).at("message").at("content").get<std::string>();
}

Genome LlmProposer::propose(const Genome& parent, const nlohmann::json& context, Rng& rng) {
  const std::string prompt = build_prompt(parent, context);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    ++requests_;
    try {
      std::string error;
      if (auto g = parse_genome_reply(request(prompt), parent.task, &error)) {
        g->id = make_genome_id(parent.task, rng);
        g->lineage = {parent.id};
        return *g;
      }
      last_error = error;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  ++fallbacks_;
  log_warning("LLM proposer gave up after " + std::to_string(config_.max_retries + 1) +
              " attempts (" + last_error + "); using the mutation operator");
  return mutate(parent, fallback_, rng);
}

}  // namespace alns
