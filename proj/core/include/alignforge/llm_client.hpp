#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "alignforge/error.hpp"

namespace alignforge::llm {

// Identity and limits of a chat-completion endpoint. The API key itself is
// never stored: api_key_ref names the environment variable holding it, and
// the value is resolved only at request time.
struct EndpointConfig {
    std::string base_url = "http://127.0.0.1:8089/v1";
    std::string model_id = "mock-model";
    std::string api_key_ref = "ALIGN_FORGE_API_KEY";
    double timeout_seconds = 60.0;
    int max_parallel = 4;
    int max_retries = 3;
    int backoff_base_ms = 250;  // full-jitter exponential backoff base
};

enum class Role { system, user, assistant };

const char* to_string(Role role);
Result<Role> role_from_string(std::string_view s);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::optional<std::string> system_instruction;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 512;
    std::vector<std::string> stop;
    std::optional<int64_t> seed;

    // Message list with system_instruction folded in as a leading system
    // message. This is what goes on the wire and what fixtures match on.
    std::vector<ChatMessage> effective_messages() const;
};

// Invariants: at most one system message, only in front; if
// system_instruction is set no system role may appear in messages; roles
// alternate user/assistant starting with user after any system message.
Result<void> validate(const ChatRequest& req);

enum class FinishReason { stop, length, content_filter, other };

const char* to_string(FinishReason reason);

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::stop;
    TokenUsage usage;
    double latency_ms = 0.0;
    int retry_count = 0;
    // Backend-reported creation time (ISO-8601). The mock backend reports a
    // fixed epoch so regenerated datasets are byte-identical.
    std::string created_at;
};

struct ScoredContinuation {
    double loglikelihood = 0.0;  // sum of natural-log token probabilities
    int token_count = 0;
    bool is_greedy = false;
};

// sha256 over the canonical JSON rendering of a message list. This is the
// digest mock fixtures match on and the one dry-run manifests record.
std::string request_digest(const std::vector<ChatMessage>& messages);

// A single-attempt transport. Retries, validation, and parallelism live in
// Client, uniformly across backends.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual Result<ChatResponse> chat_once(const EndpointConfig& cfg, const ChatRequest& req) = 0;
    virtual Result<ScoredContinuation> score_once(const EndpointConfig& cfg,
                                                  const std::string& context,
                                                  const std::string& continuation) = 0;
    virtual std::string name() const = 0;
};

std::shared_ptr<Backend> make_http_backend();

using ScorePair = std::pair<std::string, std::string>;  // (context, continuation)

class Client {
  public:
    Client(EndpointConfig cfg, std::shared_ptr<Backend> backend, uint64_t jitter_seed = 0);

    const EndpointConfig& config() const { return cfg_; }
    Backend& backend() { return *backend_; }

    // Transient failures (timeouts, rate limits, 5xx) retry with full-jitter
    // exponential backoff up to max_retries; other failures return at once.
    Result<ChatResponse> chat_complete(const ChatRequest& req);

    // Sum of logprobs of exactly the continuation's tokens given the context.
    Result<ScoredContinuation> score_continuation(const std::string& context,
                                                  const std::string& continuation);

    // Bounded-parallel ordered batches: at most max_parallel in flight,
    // output order equals input order, per-item failures carried as errors.
    std::vector<Result<ChatResponse>> chat_batch(const std::vector<ChatRequest>& requests);
    std::vector<Result<ScoredContinuation>> score_batch(const std::vector<ScorePair>& pairs);

  private:
    int backoff_delay_ms(int attempt);

    EndpointConfig cfg_;
    std::shared_ptr<Backend> backend_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

}  // namespace alignforge::llm
