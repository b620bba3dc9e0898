#include "alignforge/text.hpp"

#include <boost/locale.hpp>

#include <algorithm>
#include <cctype>

namespace alignforge::text {

namespace {

const std::locale& icu_locale() {
    static const std::locale loc = [] {
        boost::locale::generator gen;
        return gen("en_US.UTF-8");
    }();
    return loc;
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Punctuation stripped from token edges by the word tokenizer. ASCII
// punctuation plus common typographic quotes and dashes.
bool is_edge_punct(uint32_t cp) {
    if (cp < 0x80) {
        return std::ispunct(static_cast<int>(cp)) != 0;
    }
    switch (cp) {
        case 0x2018:  // left single quote
        case 0x2019:  // right single quote
        case 0x201C:  // left double quote
        case 0x201D:  // right double quote
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2026:  // ellipsis
        case 0x00AB:  // «
        case 0x00BB:  // »
            return true;
        default:
            return false;
    }
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

uint32_t decode_utf8(std::string_view s, size_t& i) {
    const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto is_cont = [&](size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
    if ((b0 & 0xE0) == 0xC0 && is_cont(i + 1)) {
        uint32_t cp = (static_cast<uint32_t>(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        i += 2;
        return cp >= 0x80 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF0) == 0xE0 && is_cont(i + 1) && is_cont(i + 2)) {
        uint32_t cp = (static_cast<uint32_t>(b0 & 0x0F) << 12) |
                      (static_cast<uint32_t>(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
        i += 3;
        return cp >= 0x800 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF8) == 0xF0 && is_cont(i + 1) && is_cont(i + 2) && is_cont(i + 3)) {
        uint32_t cp = (static_cast<uint32_t>(b0 & 0x07) << 18) |
                      (static_cast<uint32_t>(byte(i + 1) & 0x3F) << 12) |
                      (static_cast<uint32_t>(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
        i += 4;
        return (cp >= 0x10000 && cp <= 0x10FFFF) ? cp : 0xFFFD;
    }
    ++i;
    return 0xFFFD;
}

bool is_unicode_space(uint32_t cp) {
    if (cp < 0x80) return is_ascii_space(static_cast<char>(cp));
    switch (cp) {
        case 0x00A0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
        case 0x0085:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

std::string normalize_text(std::string_view raw) {
    if (raw.empty()) return {};

    // CRLF -> LF before anything else so the collapse pass sees plain LF.
    std::string unixed;
    unixed.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
        unixed.push_back(raw[i]);
    }

    std::string nfc = boost::locale::normalize(unixed, boost::locale::norm_nfc, icu_locale());

    // Collapse whitespace runs to the strongest separator they contain:
    // plain run -> " ", run with one LF -> "\n", run with two or more -> "\n\n".
    std::string out;
    out.reserve(nfc.size());
    size_t i = 0;
    while (i < nfc.size()) {
        size_t start = i;
        uint32_t cp = decode_utf8(nfc, i);
        if (!is_unicode_space(cp)) {
            out.append(nfc, start, i - start);
            continue;
        }
        int newlines = (cp == '\n') ? 1 : 0;
        while (i < nfc.size()) {
            size_t probe = i;
            uint32_t next = decode_utf8(nfc, probe);
            if (!is_unicode_space(next)) break;
            if (next == '\n') ++newlines;
            i = probe;
        }
        if (out.empty()) continue;  // leading whitespace dropped
        if (newlines >= 2) {
            out += "\n\n";
        } else if (newlines == 1) {
            out += '\n';
        } else {
            out += ' ';
        }
    }
    while (!out.empty() && is_ascii_space(out.back())) out.pop_back();
    return out;
}

std::vector<std::string> tokenize_words(std::string_view s) {
    std::vector<std::string> tokens;
    std::vector<uint32_t> current;
    auto flush = [&] {
        if (current.empty()) return;
        size_t begin = 0;
        size_t end = current.size();
        while (begin < end && is_edge_punct(current[begin])) ++begin;
        while (end > begin && is_edge_punct(current[end - 1])) --end;
        if (begin < end) {
            std::string tok;
            for (size_t k = begin; k < end; ++k) {
                uint32_t cp = current[k];
                if (cp < 0x80) cp = static_cast<uint32_t>(std::tolower(static_cast<int>(cp)));
                append_utf8(tok, cp);
            }
            tokens.push_back(std::move(tok));
        }
        current.clear();
    };
    size_t i = 0;
    while (i < s.size()) {
        uint32_t cp = decode_utf8(s, i);
        if (is_unicode_space(cp)) {
            flush();
        } else {
            current.push_back(cp);
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> tokenize_chars(std::string_view s) {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < s.size()) {
        size_t start = i;
        decode_utf8(s, i);
        tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

std::vector<std::string> tokenize_whitespace(std::string_view s) {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        size_t start = i;
        while (i < s.size() && !is_ascii_space(s[i])) ++i;
        if (i > start) tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    std::string h = to_lower_ascii(haystack);
    std::string n = to_lower_ascii(needle);
    return h.find(n) != std::string::npos;
}

}  // namespace alignforge::text
