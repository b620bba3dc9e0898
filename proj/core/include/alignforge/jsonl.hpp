#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "alignforge/error.hpp"

namespace alignforge::jsonl {

struct Record {
    size_t line_number = 0;  // 1-based
    nlohmann::json value;
};

// Parses a JSONL file. Blank lines are skipped; an unparsable line is a
// parse error naming the line number.
Result<std::vector<Record>> read_file(const std::string& path);

// Writes records as compact JSON, one per line, LF endings, UTF-8.
Result<void> write_file(const std::string& path, const std::vector<nlohmann::json>& records);

std::string to_line(const nlohmann::json& value);

}  // namespace alignforge::jsonl
