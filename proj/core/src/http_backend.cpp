#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <ctime>
#include <memory>

#include "alignforge/llm_client.hpp"

namespace alignforge::llm {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. http://127.0.0.1:8089
    std::string path_prefix;       // e.g. /v1
};

Result<ParsedUrl> parse_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        return make_error(ErrorKind::usage, "base_url needs a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
            out.path_prefix.pop_back();
        }
    }
    return out;
}

std::string iso8601_utc(long long unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class HttpBackend : public Backend {
  public:
    Result<ChatResponse> chat_once(const EndpointConfig& cfg, const ChatRequest& req) override {
        auto url = parse_base_url(cfg.base_url);
        if (!url.ok()) return url.error();

        json body{
            {"model", cfg.model_id},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens},
        };
        json messages = json::array();
        for (const auto& msg : req.effective_messages()) {
            messages.push_back(json{{"role", to_string(msg.role)}, {"content", msg.content}});
        }
        body["messages"] = std::move(messages);
        if (!req.stop.empty()) body["stop"] = req.stop;
        if (req.seed) body["seed"] = *req.seed;

        auto start = std::chrono::steady_clock::now();
        auto response = post(cfg, url.value(), "/chat/completions", body.dump());
        if (!response.ok()) return response.error();
        double latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();

        json parsed = json::parse(response.value(), nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
            return make_error(ErrorKind::transport, "malformed chat completion response");
        }
        const json& choice = parsed["choices"][0];
        std::string finish = choice.value("finish_reason", "stop");
        if (finish == "content_filter") {
            return make_error(ErrorKind::refusal, "endpoint refused the request (content filter)");
        }
        ChatResponse out;
        if (choice.contains("message")) {
            out.text = choice["message"].value("content", "");
        } else {
            out.text = choice.value("text", "");
        }
        out.finish_reason = finish == "stop"      ? FinishReason::stop
                            : finish == "length" ? FinishReason::length
                                                  : FinishReason::other;
        if (out.text.empty() && out.finish_reason == FinishReason::stop) {
            return make_error(ErrorKind::transport, "empty completion with finish_reason=stop");
        }
        if (parsed.contains("usage")) {
            out.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            out.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        }
        out.latency_ms = latency_ms;
        out.created_at = iso8601_utc(parsed.value("created", 0LL));
        return out;
    }

    Result<ScoredContinuation> score_once(const EndpointConfig& cfg, const std::string& context,
                                          const std::string& continuation) override {
        auto url = parse_base_url(cfg.base_url);
        if (!url.ok()) return url.error();

        json body{
            {"model", cfg.model_id},
            {"prompt", context + continuation},
            {"max_tokens", 0},
            {"echo", true},
            {"logprobs", 1},
            {"temperature", 0.0},
        };
        auto response = post(cfg, url.value(), "/completions", body.dump());
        if (!response.ok()) return response.error();

        json parsed = json::parse(response.value(), nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
            return make_error(ErrorKind::transport, "malformed completions response");
        }
        const json& choice = parsed["choices"][0];
        if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
            return make_error(ErrorKind::capability, "endpoint returned no logprobs");
        }
        const json& lp = choice["logprobs"];
        const json& tokens = lp.value("tokens", json::array());
        const json& token_logprobs = lp.value("token_logprobs", json::array());
        const json& offsets = lp.value("text_offset", json::array());
        const json& tops = lp.value("top_logprobs", json::array());
        if (tokens.size() != token_logprobs.size() || tokens.size() != offsets.size()) {
            return make_error(ErrorKind::transport, "inconsistent logprob arrays");
        }

        // Continuation tokens are the ones starting at or after the context
        // boundary. No token may straddle it: the previous token has to end
        // at or before the boundary.
        const size_t boundary = context.size();
        size_t first = tokens.size();
        for (size_t i = 0; i < tokens.size(); ++i) {
            if (offsets[i].get<size_t>() >= boundary) {
                first = i;
                break;
            }
        }
        if (first == tokens.size()) {
            return make_error(ErrorKind::alignment, "no tokens found for the continuation");
        }
        if (first > 0) {
            const size_t prev_end = offsets[first - 1].get<size_t>() +
                                    tokens[first - 1].get<std::string>().size();
            if (prev_end > boundary) {
                return make_error(ErrorKind::alignment,
                                  "a token straddles the context/continuation boundary");
            }
        }
        ScoredContinuation out;
        out.is_greedy = true;
        for (size_t i = first; i < tokens.size(); ++i) {
            if (token_logprobs[i].is_null()) {
                return make_error(ErrorKind::alignment,
                                  "continuation starts at a position with no logprob");
            }
            double logprob = token_logprobs[i].get<double>();
            out.loglikelihood += logprob;
            ++out.token_count;
            bool top = false;
            if (i < tops.size() && tops[i].is_object()) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& [tok, val] : tops[i].items()) {
                    best = std::max(best, val.get<double>());
                }
                top = logprob >= best - 1e-12;
            }
            out.is_greedy = out.is_greedy && top;
        }
        return out;
    }

    std::string name() const override { return "http"; }

  private:
    Result<std::string> post(const EndpointConfig& cfg, const ParsedUrl& url,
                             const std::string& endpoint, const std::string& body) {
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
        client.set_follow_location(true);

        httplib::Headers headers;
        if (const char* key = std::getenv(cfg.api_key_ref.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post(url.path_prefix + endpoint, headers, body, "application/json");
        if (!res) {
            return make_error(ErrorKind::transport,
                              "request failed: " + httplib::to_string(res.error()));
        }
        if (res->status == 429 || res->status >= 500) {
            return make_error(ErrorKind::transport, "endpoint returned " +
                                  std::to_string(res->status), res->status);
        }
        if (res->status >= 400) {
            json parsed = json::parse(res->body, nullptr, false);
            std::string message = "endpoint returned " + std::to_string(res->status);
            if (!parsed.is_discarded() && parsed.contains("error")) {
                message += ": " + parsed["error"].value("message", "");
            }
            bool logprob_gap = message.find("logprob") != std::string::npos ||
                               message.find("echo") != std::string::npos;
            return make_error(logprob_gap ? ErrorKind::capability : ErrorKind::request, message,
                              res->status);
        }
        return res->body;
    }
};

}  // namespace

std::shared_ptr<Backend> make_http_backend() { return std::make_shared<HttpBackend>(); }

}  // namespace alignforge::llm
