#include "alignforge/llm_client.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "alignforge/hash.hpp"
#include "alignforge/log.hpp"

namespace alignforge::llm {

using nlohmann::json;

const char* to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Result<Role> role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    return make_error(ErrorKind::parse, "unknown role: " + std::string(s));
}

const char* to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::content_filter: return "content_filter";
        case FinishReason::other: return "other";
    }
    return "other";
}

std::vector<ChatMessage> ChatRequest::effective_messages() const {
    std::vector<ChatMessage> out;
    out.reserve(messages.size() + 1);
    if (system_instruction) {
        out.push_back(ChatMessage{Role::system, *system_instruction});
    }
    out.insert(out.end(), messages.begin(), messages.end());
    return out;
}

Result<void> validate(const ChatRequest& req) {
    if (req.messages.empty()) {
        return make_error(ErrorKind::request, "chat request has no messages");
    }
    if (req.temperature < 0.0) {
        return make_error(ErrorKind::request, "temperature must be >= 0");
    }
    if (req.max_tokens < 1) {
        return make_error(ErrorKind::request, "max_tokens must be >= 1");
    }
    size_t first = 0;
    if (req.messages[0].role == Role::system) {
        if (req.system_instruction) {
            return make_error(ErrorKind::request,
                              "system_instruction set and a system message present");
        }
        first = 1;
    }
    Role expected = Role::user;
    for (size_t i = first; i < req.messages.size(); ++i) {
        Role role = req.messages[i].role;
        if (role == Role::system) {
            return make_error(ErrorKind::request, "system message only allowed in front");
        }
        if (role != expected) {
            return make_error(ErrorKind::request,
                              "roles must alternate user/assistant starting with user");
        }
        expected = (expected == Role::user) ? Role::assistant : Role::user;
    }
    if (req.messages.back().role != Role::user) {
        return make_error(ErrorKind::request, "last message must be from the user");
    }
    return {};
}

std::string request_digest(const std::vector<ChatMessage>& messages) {
    json canonical = json::array();
    for (const auto& msg : messages) {
        canonical.push_back(json{{"role", to_string(msg.role)}, {"content", msg.content}});
    }
    return sha256_hex(canonical.dump());
}

Client::Client(EndpointConfig cfg, std::shared_ptr<Backend> backend, uint64_t jitter_seed)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), rng_(jitter_seed) {}

int Client::backoff_delay_ms(int attempt) {
    // Full jitter: uniform over [0, base * 2^attempt], capped at 30s.
    if (cfg_.backoff_base_ms <= 0) return 0;
    double cap = static_cast<double>(cfg_.backoff_base_ms) * std::pow(2.0, attempt);
    cap = std::min(cap, 30'000.0);
    std::lock_guard<std::mutex> lock(rng_mutex_);
    return static_cast<int>(rng_() % (static_cast<uint64_t>(cap) + 1));
}

Result<ChatResponse> Client::chat_complete(const ChatRequest& req) {
    if (auto valid = validate(req); !valid.ok()) return valid.error();

    Error last = make_error(ErrorKind::transport, "no attempt made");
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        auto result = backend_->chat_once(cfg_, req);
        if (result.ok()) {
            ChatResponse resp = result.take();
            resp.retry_count = attempt;
            return resp;
        }
        last = result.error();
        if (last.kind != ErrorKind::transport) {
            return last;  // 4xx other than rate limit, refusals: no retry
        }
        if (attempt < cfg_.max_retries) {
            int delay = backoff_delay_ms(attempt);
            log::info("chat_complete transient failure (attempt " + std::to_string(attempt + 1) +
                      "/" + std::to_string(cfg_.max_retries + 1) + ", http " +
                      std::to_string(last.http_status) + "), backing off " +
                      std::to_string(delay) + "ms");
            if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
    last.message = "retries exhausted: " + last.message;
    return last;
}

Result<ScoredContinuation> Client::score_continuation(const std::string& context,
                                                      const std::string& continuation) {
    if (continuation.empty()) {
        return make_error(ErrorKind::request, "continuation must be non-empty");
    }
    Error last = make_error(ErrorKind::transport, "no attempt made");
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        auto result = backend_->score_once(cfg_, context, continuation);
        if (result.ok()) return result;
        last = result.error();
        if (last.kind != ErrorKind::transport) return last;
        if (attempt < cfg_.max_retries) {
            int delay = backoff_delay_ms(attempt);
            if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
    last.message = "retries exhausted: " + last.message;
    return last;
}

namespace {

// Bounded-parallel ordered map: at most `parallel` workers pull indices from
// a shared counter; results land in their input slot.
template <typename Out, typename Fn>
std::vector<Result<Out>> run_ordered(size_t n, int parallel, Fn&& fn) {
    std::vector<std::optional<Result<Out>>> slots(n);
    if (n == 0) return {};
    size_t workers = std::min<size_t>(std::max(parallel, 1), n);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) break;
            slots[i].emplace(fn(i));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::vector<Result<Out>> out;
    out.reserve(n);
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

}  // namespace

std::vector<Result<ChatResponse>> Client::chat_batch(const std::vector<ChatRequest>& requests) {
    return run_ordered<ChatResponse>(requests.size(), cfg_.max_parallel,
                                     [&](size_t i) { return chat_complete(requests[i]); });
}

std::vector<Result<ScoredContinuation>> Client::score_batch(const std::vector<ScorePair>& pairs) {
    return run_ordered<ScoredContinuation>(
        pairs.size(), cfg_.max_parallel,
        [&](size_t i) { return score_continuation(pairs[i].first, pairs[i].second); });
}

}  // namespace alignforge::llm
