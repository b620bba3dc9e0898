#include "alignforge/trainplan.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "alignforge/hash.hpp"

namespace alignforge::trainplan {

using nlohmann::json;

namespace {

constexpr const char* kTurnEnd = "</s>";

Result<void> check_role_order(const std::vector<llm::ChatMessage>& messages) {
    if (messages.empty()) {
        return make_error(ErrorKind::data, "cannot render an empty message list");
    }
    size_t i = 0;
    if (messages[0].role == llm::Role::system) i = 1;
    llm::Role expected = llm::Role::user;
    for (; i < messages.size(); ++i) {
        if (messages[i].role == llm::Role::system) {
            return make_error(ErrorKind::data, "system message only allowed in front");
        }
        if (messages[i].role != expected) {
            return make_error(ErrorKind::data,
                              "roles must alternate user/assistant starting with user");
        }
        expected = (expected == llm::Role::user) ? llm::Role::assistant : llm::Role::user;
    }
    return {};
}

}  // namespace

Result<std::string> render_chat_template(const std::vector<llm::ChatMessage>& messages) {
    if (auto order = check_role_order(messages); !order.ok()) return order.error();
    std::string out;
    for (const auto& msg : messages) {
        out += "<|";
        out += llm::to_string(msg.role);
        out += "|>\n";
        out += msg.content;
        out += kTurnEnd;
        out += '\n';
    }
    return out;
}

Result<std::vector<llm::ChatMessage>> parse_chat_template(const std::string& rendered) {
    std::vector<llm::ChatMessage> messages;
    size_t pos = 0;
    while (pos < rendered.size()) {
        if (rendered.compare(pos, 2, "<|") != 0) {
            return make_error(ErrorKind::parse, "expected role marker at offset " +
                                                    std::to_string(pos));
        }
        size_t role_end = rendered.find("|>\n", pos + 2);
        if (role_end == std::string::npos) {
            return make_error(ErrorKind::parse, "unterminated role marker");
        }
        auto role = llm::role_from_string(rendered.substr(pos + 2, role_end - pos - 2));
        if (!role.ok()) return role.error();
        size_t content_start = role_end + 3;
        size_t content_end = rendered.find(std::string(kTurnEnd) + "\n", content_start);
        if (content_end == std::string::npos) {
            return make_error(ErrorKind::parse, "unterminated message content");
        }
        messages.push_back(llm::ChatMessage{
            role.value(), rendered.substr(content_start, content_end - content_start)});
        pos = content_end + std::string(kTurnEnd).size() + 1;
    }
    if (messages.empty()) {
        return make_error(ErrorKind::parse, "no messages in rendering");
    }
    return messages;
}

const char* to_string(Stage stage) { return stage == Stage::sft ? "SFT" : "ORPO"; }

QloraConfig sft_qlora() { return QloraConfig{0.1, 64, 16}; }
QloraConfig orpo_qlora() { return QloraConfig{0.05, 16, 32}; }

std::string TrainRecipe::to_json_text() const {
    json out{
        {"stage", to_string(stage)},
        {"base_model_id", base_model_id},
        {"epochs", epochs},
        {"qlora", json{{"dropout", qlora.dropout},
                       {"rank", qlora.rank},
                       {"alpha", qlora.alpha},
                       {"ratio", qlora.ratio()}}},
        {"dataset_path", dataset_path},
        {"dataset_checksum", dataset_checksum},
        {"chat_template_id", chat_template_id},
        {"notes", notes},
    };
    return out.dump(2) + "\n";
}

namespace {

constexpr const char* kCheckpointNote =
    "Run per-epoch evaluation against the selected benchmarks and keep the "
    "best checkpoint; no automatic selection is performed here.";

}  // namespace

Result<TrainRecipe> emit_sft_recipe(const distill::Dataset& dataset,
                                    const std::string& base_model_id,
                                    const std::string& dataset_path) {
    if (dataset.kind != distill::DatasetKind::sft) {
        return make_error(ErrorKind::data, "SFT recipe needs a messages-format dataset");
    }
    TrainRecipe recipe;
    recipe.stage = Stage::sft;
    recipe.base_model_id = base_model_id;
    recipe.epochs = kSftEpochs;
    recipe.qlora = sft_qlora();
    recipe.dataset_path = dataset_path;
    recipe.dataset_checksum = distill::dataset_content_checksum(dataset);
    recipe.notes = kCheckpointNote;
    return recipe;
}

Result<TrainRecipe> emit_orpo_recipe(const distill::Dataset& dataset,
                                     const std::string& base_model_id,
                                     const std::string& dataset_path) {
    if (dataset.kind != distill::DatasetKind::po) {
        return make_error(ErrorKind::data, "ORPO recipe needs a chosen/rejected dataset");
    }
    TrainRecipe recipe;
    recipe.stage = Stage::orpo;
    recipe.base_model_id = base_model_id;
    recipe.epochs = kOrpoEpochs;
    recipe.qlora = orpo_qlora();
    recipe.dataset_path = dataset_path;
    recipe.dataset_checksum = distill::dataset_content_checksum(dataset);
    recipe.notes = kCheckpointNote;
    return recipe;
}

Result<void> write_recipe(const TrainRecipe& recipe, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error(ErrorKind::data, "cannot write recipe: " + path);
    out << recipe.to_json_text();
    out.flush();
    if (!out) return make_error(ErrorKind::data, "recipe write failed: " + path);
    return {};
}

Result<TrainRecipe> load_recipe(const std::string& path) {
    std::ifstream in(path);
    if (!in) return make_error(ErrorKind::data, "cannot open recipe: " + path);
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) return make_error(ErrorKind::parse, "malformed recipe: " + path);

    TrainRecipe recipe;
    std::string stage = parsed.value("stage", "");
    if (stage == "SFT") {
        recipe.stage = Stage::sft;
    } else if (stage == "ORPO") {
        recipe.stage = Stage::orpo;
    } else {
        return make_error(ErrorKind::parse, "unknown stage in recipe: " + stage);
    }
    recipe.base_model_id = parsed.value("base_model_id", "");
    recipe.epochs = parsed.value("epochs", 0);
    if (parsed.contains("qlora")) {
        recipe.qlora.dropout = parsed["qlora"].value("dropout", 0.0);
        recipe.qlora.rank = parsed["qlora"].value("rank", 0);
        recipe.qlora.alpha = parsed["qlora"].value("alpha", 0);
    }
    recipe.dataset_path = parsed.value("dataset_path", "");
    recipe.dataset_checksum = parsed.value("dataset_checksum", "");
    recipe.chat_template_id = parsed.value("chat_template_id", kChatTemplateId);
    recipe.notes = parsed.value("notes", "");
    return recipe;
}

Result<std::string> export_dataset(const distill::Dataset& dataset, const std::string& out_path) {
    auto saved = distill::save_dataset(dataset, out_path);
    if (!saved.ok()) return saved.error();
    return sha256_file_hex(out_path);
}

}  // namespace alignforge::trainplan
