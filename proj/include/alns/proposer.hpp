#pragma once

#include <atomic>
#include <optional>
#include <string>

#include "alns/genome.hpp"

namespace alns {

/// Produces a child genome from a parent. Implementations must be safe to
/// call from several island threads at once.
class Proposer {
 public:
  virtual ~Proposer() = default;
  /// `context` carries the parent's metrics history (free-form JSON).
  virtual Genome propose(const Genome& parent, const nlohmann::json& context, Rng& rng) = 0;
};

class MutationProposer final : public Proposer {
 public:
  explicit MutationProposer(MutationParams params = {}) : params_(params) {}
  Genome propose(const Genome& parent, const nlohmann::json&, Rng& rng) override {
    return mutate(parent, params_, rng);
  }

 private:
  MutationParams params_;
};

/// OpenAI-compatible chat-completions endpoint.
struct LlmConfig {
  /// e.g. "http://127.0.0.1:8000/v1" or "https://api.example.com/v1".
  std::string base_url;
  std::string model;
  /// Name of the environment variable holding the API key; may be empty.
  std::string api_key_env;
  double temperature = 0.7;
  int max_retries = 3;
  int timeout_seconds = 60;

  /// Throws std::invalid_argument when the endpoint or model is missing.
  void validate() const;
};

/// Prompt text: role, task, constraints, then the parent genome and its
/// metrics history.
std::string build_prompt(const Genome& parent, const nlohmann::json& context);

/// Extracts and validates the genome in the first ```json fenced block of
/// `reply`. Returns nullopt and sets `error` on any problem.
std::optional<Genome> parse_genome_reply(const std::string& reply, Slot task, std::string* error = nullptr);

/// Asks the endpoint for a child genome; after 1 + max_retries failed
/// attempts (network, parse or bounds) falls back to `mutate` with a warning.
class LlmProposer final : public Proposer {
 public:
  LlmProposer(LlmConfig config, MutationParams fallback = {});
  Genome propose(const Genome& parent, const nlohmann::json& context, Rng& rng) override;

  std::size_t requests() const noexcept { return requests_; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }

 private:
  /// One HTTP round trip; returns the assistant message text.
  std::string request(const std::string& prompt) const;

  LlmConfig config_;
  MutationParams fallback_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> fallbacks_{0};
};

}  // namespace alns
