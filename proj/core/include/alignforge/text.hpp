#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace alignforge::text {

// Canonical text normalization applied to every ingested document body:
// Unicode NFC, CRLF -> LF, whitespace runs collapsed to the strongest
// separator they contain (space < "\n" < "\n\n"), leading/trailing
// whitespace stripped. Total and idempotent.
std::string normalize_text(std::string_view raw);

// Word tokenizer backing the information-theoretic metrics: ASCII
// lowercasing, split on Unicode whitespace, leading/trailing punctuation
// stripped from each token. Pinned so estimator versions stay comparable.
std::vector<std::string> tokenize_words(std::string_view s);

// Unicode scalar values as individual tokens.
std::vector<std::string> tokenize_chars(std::string_view s);

// Whitespace-run tokenizer used by the mock backend's per-token model.
std::vector<std::string> tokenize_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

// Decodes one UTF-8 scalar starting at `i`; advances `i`. Invalid bytes
// decode as U+FFFD advancing one byte.
uint32_t decode_utf8(std::string_view s, size_t& i);

bool is_unicode_space(uint32_t cp);

}  // namespace alignforge::text
