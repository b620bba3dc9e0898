#include "alignforge/error.hpp"

namespace alignforge {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::data: return "data";
        case ErrorKind::parse: return "parse";
        case ErrorKind::transport: return "transport";
        case ErrorKind::request: return "request";
        case ErrorKind::refusal: return "refusal";
        case ErrorKind::capability: return "capability";
        case ErrorKind::alignment: return "alignment";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

std::string Error::describe() const {
    std::string out = "[";
    out += to_string(kind);
    out += "] ";
    out += message;
    if (http_status != 0) {
        out += " (http ";
        out += std::to_string(http_status);
        out += ")";
    }
    return out;
}

}  // namespace alignforge
