#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace alignforge {

// Error taxonomy shared across the toolkit. The CLI maps these onto its
// exit-code contract: usage/config -> 1, data/validation -> 2,
// transport/capability -> 3.
enum class ErrorKind {
    usage,       // bad flags, malformed run config
    data,        // invalid input data, failed validation, size errors
    parse,       // unparsable record or generation
    transport,   // exhausted retries, timeouts, 5xx
    request,     // non-retryable 4xx, precondition violations on requests
    refusal,     // content-filter refusal from the model
    capability,  // endpoint lacks a required feature (e.g. logprobs)
    alignment,   // continuation cannot be isolated on a token boundary
    internal,
};

const char* to_string(ErrorKind kind);

struct Error {
    ErrorKind kind = ErrorKind::internal;
    std::string message;
    int http_status = 0;

    std::string describe() const;
};

inline Error make_error(ErrorKind kind, std::string message, int http_status = 0) {
    return Error{kind, std::move(message), http_status};
}

// Minimal expected-style result. Functions that can fail per their contract
// return Result<T>; invariant violations that indicate programmer error throw.
template <typename T>
class Result {
  public:
    Result(T value) : state_(std::move(value)) {}
    Result(Error error) : state_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    T& value() {
        require_ok();
        return std::get<T>(state_);
    }
    const T& value() const {
        require_ok();
        return std::get<T>(state_);
    }
    T&& take() {
        require_ok();
        return std::get<T>(std::move(state_));
    }

    const Error& error() const {
        if (ok()) throw std::logic_error("Result holds a value, not an error");
        return std::get<Error>(state_);
    }

    T value_or(T fallback) const { return ok() ? std::get<T>(state_) : std::move(fallback); }

  private:
    void require_ok() const {
        if (!ok()) {
            throw std::runtime_error("unchecked Result error: " + std::get<Error>(state_).describe());
        }
    }

    std::variant<T, Error> state_;
};

template <>
class Result<void> {
  public:
    Result() = default;
    Result(Error error) : error_(std::move(error)), has_error_(true) {}

    bool ok() const { return !has_error_; }
    explicit operator bool() const { return ok(); }
    const Error& error() const {
        if (ok()) throw std::logic_error("Result holds no error");
        return error_;
    }

  private:
    Error error_;
    bool has_error_ = false;
};

}  // namespace alignforge
