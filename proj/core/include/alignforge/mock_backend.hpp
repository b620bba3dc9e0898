#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "alignforge/llm_client.hpp"

namespace alignforge::llm {

// One scripted backend outcome. Sequences of steps model transient failures
// (e.g. 429, 429, then success); the last step repeats once consumed.
struct MockStep {
    int status = 200;
    bool refusal = false;
    std::string text;
    int delay_ms = 0;
};

struct MockFixture {
    // Match rules, most specific first: digest of the effective message
    // list, substring of the last user message, or default catch-all.
    std::string digest;
    std::string user_contains;
    bool is_default = false;
    std::vector<MockStep> steps;
};

struct MockTokenEntry {
    double logprob = 0.0;
    bool greedy = false;
};

// Unigram per-token model over whitespace tokens. Absent table means the
// backend advertises no logprob capability.
struct MockLogprobTable {
    MockTokenEntry fallback{-1.0, false};
    std::map<std::string, MockTokenEntry> tokens;
};

// Deterministic in-process stand-in for a chat-completion endpoint, driven
// by a fixture file mapping request digests to responses plus a per-token
// logprob table. All pipeline and eval tests run against it.
class MockBackend : public Backend {
  public:
    MockBackend() = default;

    // Fixture JSONL lines:
    //   {"match": {"digest": "..."}, "response": {"text": "..."}}
    //   {"match": {"user_contains": "..."}, "response": {"sequence": [{"status": 429}, {"text": "ok"}]}}
    //   {"match": {"default": true}, "response": {"refusal": true}}
    // Logprob table JSON:
    //   {"default": {"logprob": -1.0, "greedy": false},
    //    "tokens": {"A": {"logprob": -0.5, "greedy": true}}}
    static Result<std::shared_ptr<MockBackend>> from_files(
        const std::string& fixtures_path, const std::optional<std::string>& logprob_path);

    void add_fixture(MockFixture fixture);
    // Sugar: fixture keyed on the digest of `messages` answering `text`.
    void add_response(const std::vector<ChatMessage>& messages, std::string text);
    void set_default_response(std::string text);
    void set_logprob_table(MockLogprobTable table);
    // Deterministic pseudo-random per-call delays, for exercising the
    // ordered-batch contract under out-of-order completion.
    void set_delay_jitter(int max_ms, uint64_t seed);

    size_t chat_calls() const;

    Result<ChatResponse> chat_once(const EndpointConfig& cfg, const ChatRequest& req) override;
    Result<ScoredContinuation> score_once(const EndpointConfig& cfg, const std::string& context,
                                          const std::string& continuation) override;
    std::string name() const override { return "mock"; }

  private:
    MockFixture* find_fixture(const std::vector<ChatMessage>& messages);

    mutable std::mutex mutex_;
    std::vector<MockFixture> fixtures_;
    std::map<size_t, size_t> step_cursor_;  // fixture index -> next step
    std::optional<MockLogprobTable> logprobs_;
    int delay_jitter_max_ms_ = 0;
    uint64_t delay_seed_ = 0;
    size_t chat_calls_ = 0;
};

// Serves a MockBackend over local HTTP with OpenAI-compatible endpoints
// (chat completions; completions with logprobs+echo), so the HTTP transport
// can be exercised end-to-end without a real endpoint.
class MockServer {
  public:
    explicit MockServer(std::shared_ptr<MockBackend> backend);
    ~MockServer();

    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    // Binds 127.0.0.1 on a free port and serves until stop().
    Result<void> start();
    void stop();
    std::string base_url() const;  // e.g. http://127.0.0.1:40123/v1

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace alignforge::llm
