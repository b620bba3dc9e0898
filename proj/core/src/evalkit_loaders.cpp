#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "alignforge/evalkit.hpp"
#include "alignforge/jsonl.hpp"

namespace alignforge::evalkit {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(TaskId task) {
    switch (task) {
        case TaskId::arc_challenge: return "arc_challenge";
        case TaskId::bbq_lite_json: return "bbq_lite_json";
        case TaskId::truthfulqa_mc2: return "truthfulqa_mc2";
    }
    return "arc_challenge";
}

Result<TaskId> task_from_string(std::string_view s) {
    if (s == "arc_challenge" || s == "arc-challenge") return TaskId::arc_challenge;
    if (s == "bbq_lite_json" || s == "bbq-lite" || s == "bbq") return TaskId::bbq_lite_json;
    if (s == "truthfulqa_mc2" || s == "truthfulqa") return TaskId::truthfulqa_mc2;
    return make_error(ErrorKind::usage, "unknown task: " + std::string(s));
}

namespace {

Result<void> validate_item(const BenchmarkItem& item, const std::string& where) {
    if (item.task_id == TaskId::truthfulqa_mc2) {
        if (item.true_answers.empty() || item.false_answers.empty()) {
            return make_error(ErrorKind::data,
                              where + ": truthfulqa item needs non-empty true and false sets");
        }
        return {};
    }
    if (item.choices.size() < 2) {
        return make_error(ErrorKind::data, where + ": item needs at least 2 choices");
    }
    if (item.gold < 0 || item.gold >= static_cast<int>(item.choices.size())) {
        return make_error(ErrorKind::data, where + ": gold index out of range");
    }
    return {};
}

// AI2 ARC JSONL ({"question": {"stem", "choices": [{"text","label"}]}}) and
// the flat variant ({"question": str, "choices": {"text": [], "label": []}}).
Result<BenchmarkItem> arc_item_from_json(const json& record, const std::string& where) {
    BenchmarkItem item;
    item.task_id = TaskId::arc_challenge;
    std::vector<std::string> labels;
    if (!record.contains("question")) {
        return make_error(ErrorKind::parse, where + ": record has no question");
    }
    if (record["question"].is_object()) {
        item.question = record["question"].value("stem", "");
        for (const auto& choice : record["question"].value("choices", json::array())) {
            item.choices.push_back(choice.value("text", ""));
            labels.push_back(choice.value("label", ""));
        }
    } else {
        item.question = record["question"].get<std::string>();
        if (!record.contains("choices") || !record["choices"].is_object()) {
            return make_error(ErrorKind::parse, where + ": record has no choices");
        }
        for (const auto& text : record["choices"].value("text", json::array())) {
            item.choices.push_back(text.get<std::string>());
        }
        for (const auto& label : record["choices"].value("label", json::array())) {
            labels.push_back(label.get<std::string>());
        }
    }
    if (labels.size() != item.choices.size()) {
        return make_error(ErrorKind::parse, where + ": choice/label count mismatch");
    }
    std::string key = record.value("answerKey", "");
    auto it = std::find(labels.begin(), labels.end(), key);
    if (it == labels.end()) {
        return make_error(ErrorKind::parse, where + ": answerKey \"" + key +
                                                "\" matches no choice label");
    }
    item.gold = static_cast<int>(it - labels.begin());
    return item;
}

Result<std::vector<BenchmarkItem>> load_arc_file(const std::string& path) {
    auto records = jsonl::read_file(path);
    if (!records.ok()) return records.error();
    std::vector<BenchmarkItem> items;
    for (const auto& record : records.value()) {
        std::string where = path + ":" + std::to_string(record.line_number);
        auto item = arc_item_from_json(record.value, where);
        if (!item.ok()) return item.error();
        if (auto valid = validate_item(item.value(), where); !valid.ok()) return valid.error();
        items.push_back(item.take());
    }
    return items;
}

// BIG-bench task.json; ordered parse so choice order matches the file.
Result<std::vector<BenchmarkItem>> load_bbq_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return make_error(ErrorKind::data, "cannot open " + path);
    ordered_json task = ordered_json::parse(in, nullptr, false);
    if (task.is_discarded()) return make_error(ErrorKind::parse, "malformed JSON: " + path);
    if (!task.contains("examples") || !task["examples"].is_array()) {
        return make_error(ErrorKind::parse, path + ": no examples array");
    }
    std::string category = task.value("name", fs::path(path).stem().string());

    std::vector<BenchmarkItem> items;
    size_t index = 0;
    for (const auto& example : task["examples"]) {
        std::string where = path + " example " + std::to_string(index++);
        BenchmarkItem item;
        item.task_id = TaskId::bbq_lite_json;
        item.category = category;
        item.question = example.value("input", "");
        if (item.question.empty()) {
            return make_error(ErrorKind::parse, where + ": empty input");
        }
        if (!example.contains("target_scores") || !example["target_scores"].is_object()) {
            return make_error(ErrorKind::parse, where + ": no target_scores");
        }
        double best = -1.0;
        for (const auto& [choice, score] : example["target_scores"].items()) {
            double value = score.get<double>();
            if (value > best) {
                best = value;
                item.gold = static_cast<int>(item.choices.size());
            }
            item.choices.push_back(choice);
        }
        if (auto valid = validate_item(item, where); !valid.ok()) return valid.error();
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<std::string> split_answers(const std::string& joined) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= joined.size()) {
        size_t sep = joined.find(';', start);
        std::string part = joined.substr(
            start, sep == std::string::npos ? std::string::npos : sep - start);
        size_t begin = part.find_first_not_of(" \t");
        size_t end = part.find_last_not_of(" \t");
        if (begin != std::string::npos) out.push_back(part.substr(begin, end - begin + 1));
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    return out;
}

// RFC-4180 CSV row reader handling quoted fields and embedded newlines.
Result<std::vector<std::vector<std::string>>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(ErrorKind::data, "cannot open " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                break;
            case '\n':
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                break;
            default:
                field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    if (quoted) return make_error(ErrorKind::parse, path + ": unterminated quoted field");
    return rows;
}

Result<std::vector<BenchmarkItem>> load_truthfulqa_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (!rows.ok()) return rows.error();
    if (rows.value().empty()) return make_error(ErrorKind::data, path + ": empty CSV");

    const auto& header = rows.value().front();
    auto column = [&header](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    int q_col = column("Question");
    int correct_col = column("Correct Answers");
    int incorrect_col = column("Incorrect Answers");
    int category_col = column("Category");
    if (q_col < 0 || correct_col < 0 || incorrect_col < 0) {
        return make_error(ErrorKind::parse, path + ": missing expected CSV columns");
    }

    std::vector<BenchmarkItem> items;
    for (size_t r = 1; r < rows.value().size(); ++r) {
        const auto& row = rows.value()[r];
        std::string where = path + " row " + std::to_string(r);
        size_t needed = static_cast<size_t>(std::max({q_col, correct_col, incorrect_col})) + 1;
        if (row.size() < needed) {
            return make_error(ErrorKind::parse, where + ": too few columns");
        }
        BenchmarkItem item;
        item.task_id = TaskId::truthfulqa_mc2;
        item.question = row[q_col];
        item.true_answers = split_answers(row[correct_col]);
        item.false_answers = split_answers(row[incorrect_col]);
        if (category_col >= 0 && static_cast<size_t>(category_col) < row.size()) {
            item.category = row[category_col];
        }
        if (auto valid = validate_item(item, where); !valid.ok()) return valid.error();
        items.push_back(std::move(item));
    }
    return items;
}

Result<std::vector<BenchmarkItem>> load_truthfulqa_jsonl(const std::string& path) {
    auto records = jsonl::read_file(path);
    if (!records.ok()) return records.error();
    std::vector<BenchmarkItem> items;
    for (const auto& record : records.value()) {
        std::string where = path + ":" + std::to_string(record.line_number);
        const json& value = record.value;
        BenchmarkItem item;
        item.task_id = TaskId::truthfulqa_mc2;
        item.question = value.value("question", "");
        item.category = value.value("category", "");
        if (!value.contains("mc2_targets") || !value["mc2_targets"].is_object()) {
            return make_error(ErrorKind::parse, where + ": record has no mc2_targets");
        }
        const json& targets = value["mc2_targets"];
        const json& choices = targets.value("choices", json::array());
        const json& labels = targets.value("labels", json::array());
        if (choices.size() != labels.size() || choices.empty()) {
            return make_error(ErrorKind::parse, where + ": mc2 choices/labels mismatch");
        }
        for (size_t i = 0; i < choices.size(); ++i) {
            if (labels[i].get<int>() == 1) {
                item.true_answers.push_back(choices[i].get<std::string>());
            } else {
                item.false_answers.push_back(choices[i].get<std::string>());
            }
        }
        if (auto valid = validate_item(item, where); !valid.ok()) return valid.error();
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<std::string> sorted_files(const std::string& dir, const std::string& extension) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

Result<std::vector<BenchmarkItem>> load_task(TaskId task, const std::string& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        return make_error(ErrorKind::data, "task path does not exist: " + path);
    }
    const bool is_dir = fs::is_directory(path, ec);

    std::vector<std::string> files;
    if (is_dir) {
        files = sorted_files(path, task == TaskId::bbq_lite_json ? ".json" : ".jsonl");
        if (task == TaskId::truthfulqa_mc2 && files.empty()) {
            files = sorted_files(path, ".csv");
        }
        if (files.empty()) {
            return make_error(ErrorKind::data, "no task files found under " + path);
        }
    } else {
        files.push_back(path);
    }

    std::vector<BenchmarkItem> items;
    for (const auto& file : files) {
        Result<std::vector<BenchmarkItem>> loaded = [&]() {
            switch (task) {
                case TaskId::arc_challenge:
                    return load_arc_file(file);
                case TaskId::bbq_lite_json:
                    return load_bbq_file(file);
                case TaskId::truthfulqa_mc2:
                    return fs::path(file).extension() == ".csv" ? load_truthfulqa_csv(file)
                                                                : load_truthfulqa_jsonl(file);
            }
            return Result<std::vector<BenchmarkItem>>(
                make_error(ErrorKind::internal, "unreachable"));
        }();
        if (!loaded.ok()) return loaded.error();
        for (auto& item : loaded.value()) items.push_back(std::move(item));
    }
    return items;
}

}  // namespace alignforge::evalkit
