#include "alignforge/mock_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <thread>

#include "alignforge/hash.hpp"
#include "alignforge/jsonl.hpp"
#include "alignforge/text.hpp"

namespace alignforge::llm {

using nlohmann::json;

namespace {

constexpr const char* kMockEpoch = "1970-01-01T00:00:00Z";

Result<std::vector<MockStep>> parse_steps(const json& response) {
    std::vector<MockStep> steps;
    auto parse_one = [](const json& node) -> Result<MockStep> {
        MockStep step;
        if (!node.is_object()) {
            return make_error(ErrorKind::parse, "fixture response step must be an object");
        }
        step.status = node.value("status", 200);
        step.refusal = node.value("refusal", false);
        step.text = node.value("text", std::string{});
        step.delay_ms = node.value("delay_ms", 0);
        return step;
    };
    if (response.contains("sequence")) {
        for (const auto& node : response["sequence"]) {
            auto step = parse_one(node);
            if (!step.ok()) return step.error();
            steps.push_back(step.take());
        }
    } else {
        auto step = parse_one(response);
        if (!step.ok()) return step.error();
        steps.push_back(step.take());
    }
    if (steps.empty()) {
        return make_error(ErrorKind::parse, "fixture has an empty response sequence");
    }
    return steps;
}

int count_tokens(const std::string& s) {
    return static_cast<int>(text::tokenize_whitespace(s).size());
}

}  // namespace

Result<std::shared_ptr<MockBackend>> MockBackend::from_files(
    const std::string& fixtures_path, const std::optional<std::string>& logprob_path) {
    auto records = jsonl::read_file(fixtures_path);
    if (!records.ok()) return records.error();

    auto backend = std::make_shared<MockBackend>();
    for (const auto& record : records.value()) {
        const json& value = record.value;
        std::string where = fixtures_path + ":" + std::to_string(record.line_number);
        if (!value.is_object() || !value.contains("match") || !value.contains("response")) {
            return make_error(ErrorKind::parse, where + ": fixture needs match and response");
        }
        MockFixture fixture;
        const json& match = value["match"];
        fixture.digest = match.value("digest", std::string{});
        fixture.user_contains = match.value("user_contains", std::string{});
        fixture.is_default = match.value("default", false);
        if (fixture.digest.empty() && fixture.user_contains.empty() && !fixture.is_default) {
            return make_error(ErrorKind::parse, where + ": fixture match rule is empty");
        }
        auto steps = parse_steps(value["response"]);
        if (!steps.ok()) return steps.error();
        fixture.steps = steps.take();
        backend->add_fixture(std::move(fixture));
    }

    if (logprob_path) {
        std::ifstream in(*logprob_path);
        if (!in) return make_error(ErrorKind::data, "cannot open logprob table: " + *logprob_path);
        json table = json::parse(in, nullptr, false);
        if (table.is_discarded()) {
            return make_error(ErrorKind::parse, "malformed logprob table: " + *logprob_path);
        }
        MockLogprobTable parsed;
        if (table.contains("default")) {
            parsed.fallback.logprob = table["default"].value("logprob", -1.0);
            parsed.fallback.greedy = table["default"].value("greedy", false);
        }
        if (table.contains("tokens")) {
            for (const auto& [token, node] : table["tokens"].items()) {
                parsed.tokens[token] =
                    MockTokenEntry{node.value("logprob", -1.0), node.value("greedy", false)};
            }
        }
        backend->set_logprob_table(std::move(parsed));
    }
    return backend;
}

void MockBackend::add_fixture(MockFixture fixture) {
    std::lock_guard<std::mutex> lock(mutex_);
    fixtures_.push_back(std::move(fixture));
}

void MockBackend::add_response(const std::vector<ChatMessage>& messages, std::string text) {
    MockFixture fixture;
    fixture.digest = request_digest(messages);
    fixture.steps.push_back(MockStep{200, false, std::move(text), 0});
    add_fixture(std::move(fixture));
}

void MockBackend::set_default_response(std::string text) {
    MockFixture fixture;
    fixture.is_default = true;
    fixture.steps.push_back(MockStep{200, false, std::move(text), 0});
    add_fixture(std::move(fixture));
}

void MockBackend::set_logprob_table(MockLogprobTable table) {
    std::lock_guard<std::mutex> lock(mutex_);
    logprobs_ = std::move(table);
}

void MockBackend::set_delay_jitter(int max_ms, uint64_t seed) {
    std::lock_guard<std::mutex> lock(mutex_);
    delay_jitter_max_ms_ = max_ms;
    delay_seed_ = seed;
}

size_t MockBackend::chat_calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return chat_calls_;
}

MockFixture* MockBackend::find_fixture(const std::vector<ChatMessage>& messages) {
    const std::string digest = request_digest(messages);
    for (auto& fixture : fixtures_) {
        if (!fixture.digest.empty() && fixture.digest == digest) return &fixture;
    }
    std::string last_user;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) {
            last_user = it->content;
            break;
        }
    }
    for (auto& fixture : fixtures_) {
        if (!fixture.user_contains.empty() &&
            last_user.find(fixture.user_contains) != std::string::npos) {
            return &fixture;
        }
    }
    for (auto& fixture : fixtures_) {
        if (fixture.is_default) return &fixture;
    }
    return nullptr;
}

Result<ChatResponse> MockBackend::chat_once(const EndpointConfig&, const ChatRequest& req) {
    MockStep step;
    int delay = 0;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        ++chat_calls_;
        auto messages = req.effective_messages();
        MockFixture* fixture = find_fixture(messages);
        if (!fixture) {
            return make_error(ErrorKind::request,
                              "no fixture matches request digest " + request_digest(messages), 404);
        }
        size_t index = static_cast<size_t>(fixture - fixtures_.data());
        size_t cursor = step_cursor_[index];
        step = fixture->steps[std::min(cursor, fixture->steps.size() - 1)];
        step_cursor_[index] = cursor + 1;
        if (delay_jitter_max_ms_ > 0) {
            // Deterministic pseudo-random delay derived from seed and call count.
            uint64_t h = delay_seed_ ^ (chat_calls_ * 0x9E3779B97F4A7C15ULL);
            h ^= h >> 33;
            h *= 0xFF51AFD7ED558CCDULL;
            h ^= h >> 33;
            delay = static_cast<int>(h % static_cast<uint64_t>(delay_jitter_max_ms_ + 1));
        }
    }
    delay += step.delay_ms;
    if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));

    if (step.refusal) {
        return make_error(ErrorKind::refusal, "mock content filter refusal");
    }
    if (step.status == 429 || step.status >= 500) {
        return make_error(ErrorKind::transport, "mock transient failure", step.status);
    }
    if (step.status != 200) {
        return make_error(ErrorKind::request, "mock request failure", step.status);
    }
    ChatResponse resp;
    resp.text = step.text;
    resp.finish_reason = FinishReason::stop;
    resp.usage.prompt_tokens = 0;
    for (const auto& msg : req.effective_messages()) {
        resp.usage.prompt_tokens += count_tokens(msg.content);
    }
    resp.usage.completion_tokens = count_tokens(resp.text);
    resp.latency_ms = static_cast<double>(delay);
    resp.created_at = kMockEpoch;
    return resp;
}

Result<ScoredContinuation> MockBackend::score_once(const EndpointConfig&, const std::string&,
                                                   const std::string& continuation) {
    std::optional<MockLogprobTable> table;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        table = logprobs_;
    }
    if (!table) {
        return make_error(ErrorKind::capability, "mock backend has no logprob table", 400);
    }
    auto tokens = text::tokenize_whitespace(continuation);
    if (tokens.empty()) {
        return make_error(ErrorKind::alignment, "continuation holds no scoreable tokens");
    }
    ScoredContinuation scored;
    scored.token_count = static_cast<int>(tokens.size());
    scored.is_greedy = true;
    for (const auto& token : tokens) {
        auto it = table->tokens.find(token);
        const MockTokenEntry& entry = (it != table->tokens.end()) ? it->second : table->fallback;
        scored.loglikelihood += entry.logprob;
        scored.is_greedy = scored.is_greedy && entry.greedy;
    }
    return scored;
}

// ---------------------------------------------------------------------------
// MockServer: the same fixtures behind OpenAI-compatible local HTTP.

struct MockServer::Impl {
    std::shared_ptr<MockBackend> backend;
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

MockServer::MockServer(std::shared_ptr<MockBackend> backend) : impl_(std::make_unique<Impl>()) {
    impl_->backend = std::move(backend);
}

MockServer::~MockServer() { stop(); }

Result<void> MockServer::start() {
    auto* impl = impl_.get();

    impl->server.Post("/v1/chat/completions", [impl](const httplib::Request& req,
                                                     httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            res.status = 400;
            res.set_content(R"({"error": {"message": "malformed JSON"}})", "application/json");
            return;
        }
        ChatRequest chat;
        chat.temperature = body.value("temperature", 0.7);
        chat.max_tokens = body.value("max_tokens", 512);
        for (const auto& msg : body.value("messages", json::array())) {
            auto role = role_from_string(msg.value("role", "user"));
            if (!role.ok()) {
                res.status = 400;
                res.set_content(R"({"error": {"message": "bad role"}})", "application/json");
                return;
            }
            chat.messages.push_back(ChatMessage{role.value(), msg.value("content", "")});
        }
        EndpointConfig cfg;
        auto result = impl->backend->chat_once(cfg, chat);
        if (!result.ok()) {
            const Error& err = result.error();
            if (err.kind == ErrorKind::refusal) {
                json ok{{"choices",
                         json::array({json{{"index", 0},
                                           {"message", json{{"role", "assistant"}, {"content", ""}}},
                                           {"finish_reason", "content_filter"}}})},
                        {"created", 0},
                        {"usage", json{{"prompt_tokens", 0}, {"completion_tokens", 0}}}};
                res.set_content(ok.dump(), "application/json");
                return;
            }
            res.status = err.http_status != 0 ? err.http_status : 500;
            res.set_content(json{{"error", json{{"message", err.message}}}}.dump(),
                            "application/json");
            return;
        }
        const ChatResponse& resp = result.value();
        json ok{{"choices", json::array({json{{"index", 0},
                                              {"message", json{{"role", "assistant"},
                                                               {"content", resp.text}}},
                                              {"finish_reason", "stop"}}})},
                {"created", 0},
                {"usage", json{{"prompt_tokens", resp.usage.prompt_tokens},
                               {"completion_tokens", resp.usage.completion_tokens}}}};
        res.set_content(ok.dump(), "application/json");
    });

    impl->server.Post("/v1/completions", [impl](const httplib::Request& req,
                                                httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("prompt")) {
            res.status = 400;
            res.set_content(R"({"error": {"message": "malformed completions request"}})",
                            "application/json");
            return;
        }
        bool echo = body.value("echo", false);
        bool want_logprobs = body.contains("logprobs") && !body["logprobs"].is_null();
        if (!echo || !want_logprobs) {
            res.status = 400;
            res.set_content(R"({"error": {"message": "only echo+logprobs scoring is supported"}})",
                            "application/json");
            return;
        }
        std::string prompt = body["prompt"].get<std::string>();

        auto probe = impl->backend->score_once(EndpointConfig{}, "", prompt);
        if (!probe.ok() && probe.error().kind == ErrorKind::capability) {
            res.status = 400;
            res.set_content(R"({"error": {"message": "logprobs are not supported"}})",
                            "application/json");
            return;
        }

        // Whitespace tokens with offsets; each token's logprob from the table.
        json tokens = json::array();
        json token_logprobs = json::array();
        json text_offsets = json::array();
        json top_logprobs = json::array();
        size_t i = 0;
        auto is_space = [](char c) {
            return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        };
        while (i < prompt.size()) {
            while (i < prompt.size() && is_space(prompt[i])) ++i;
            if (i >= prompt.size()) break;
            size_t start = i;
            while (i < prompt.size() && !is_space(prompt[i])) ++i;
            std::string token = prompt.substr(start, i - start);
            auto scored = impl->backend->score_once(EndpointConfig{}, "", token);
            double lp = scored.ok() ? scored.value().loglikelihood : -1.0;
            bool greedy = scored.ok() && scored.value().is_greedy;
            tokens.push_back(token);
            token_logprobs.push_back(lp);
            text_offsets.push_back(start);
            json top;
            top[token] = lp;
            if (!greedy) top["<top>"] = lp + 1.0;  // some other token outranks this one
            top_logprobs.push_back(top);
        }
        json ok{{"choices",
                 json::array({json{{"index", 0},
                                   {"text", prompt},
                                   {"finish_reason", "stop"},
                                   {"logprobs", json{{"tokens", tokens},
                                                     {"token_logprobs", token_logprobs},
                                                     {"text_offset", text_offsets},
                                                     {"top_logprobs", top_logprobs}}}}})},
                {"created", 0},
                {"usage", json{{"prompt_tokens", tokens.size()}, {"completion_tokens", 0}}}};
        res.set_content(ok.dump(), "application/json");
    });

    impl->port = impl->server.bind_to_any_port("127.0.0.1");
    if (impl->port <= 0) {
        return make_error(ErrorKind::transport, "mock server failed to bind a local port");
    }
    impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
    return {};
}

void MockServer::stop() {
    if (!impl_) return;
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1";
}

}  // namespace alignforge::llm
