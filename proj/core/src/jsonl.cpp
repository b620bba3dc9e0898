#include "alignforge/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace alignforge::jsonl {

using nlohmann::json;

Result<std::vector<Record>> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return make_error(ErrorKind::data, "cannot open file: " + path);
    }
    std::vector<Record> records;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json value = json::parse(line, nullptr, false);
        if (value.is_discarded()) {
            return make_error(ErrorKind::parse,
                              path + ":" + std::to_string(line_number) + ": malformed JSON record");
        }
        records.push_back(Record{line_number, std::move(value)});
    }
    return records;
}

Result<void> write_file(const std::string& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return make_error(ErrorKind::data, "cannot write file: " + path);
    }
    for (const auto& record : records) {
        out << to_line(record) << '\n';
    }
    out.flush();
    if (!out) {
        return make_error(ErrorKind::data, "write failed: " + path);
    }
    return {};
}

std::string to_line(const json& value) {
    return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace alignforge::jsonl
