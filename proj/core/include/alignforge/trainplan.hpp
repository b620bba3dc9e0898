#pragma once

#include <string>
#include <vector>

#include "alignforge/distill.hpp"
#include "alignforge/error.hpp"
#include "alignforge/llm_client.hpp"

namespace alignforge::trainplan {

inline constexpr const char* kChatTemplateId = "zephyr_v1";

// Flat training/scoring string: per message, "<|role|>\n" + content +
// "</s>\n", in order. No trailing generation prompt. Requires an optional
// single leading system message followed by user/assistant alternation
// starting with user.
Result<std::string> render_chat_template(const std::vector<llm::ChatMessage>& messages);

// Inverse of render_chat_template for well-formed renderings; backs the
// injectivity property test.
Result<std::vector<llm::ChatMessage>> parse_chat_template(const std::string& rendered);

struct QloraConfig {
    double dropout = 0.0;
    int rank = 0;
    int alpha = 0;

    // Reported exactly as the rank-to-alpha relationship: rank / alpha.
    double ratio() const { return static_cast<double>(rank) / static_cast<double>(alpha); }
};

enum class Stage { sft, orpo };

const char* to_string(Stage stage);

struct TrainRecipe {
    Stage stage = Stage::sft;
    std::string base_model_id;
    int epochs = 0;
    QloraConfig qlora;
    std::string dataset_path;
    std::string dataset_checksum;
    std::string chat_template_id = kChatTemplateId;
    std::string notes;

    std::string to_json_text() const;  // stable rendering; re-emission is byte-identical
};

// Fixed fine-tuning hyperparameters carried by emitted recipes.
QloraConfig sft_qlora();   // dropout 0.1, rank 64, alpha 16
QloraConfig orpo_qlora();  // dropout 0.05, rank 16, alpha 32
inline constexpr int kSftEpochs = 23;
inline constexpr int kOrpoEpochs = 10;

// Recipe for supervised fine-tuning on a messages-format dataset.
Result<TrainRecipe> emit_sft_recipe(const distill::Dataset& dataset,
                                    const std::string& base_model_id,
                                    const std::string& dataset_path);

// Recipe for preference optimisation on a chosen/rejected dataset.
Result<TrainRecipe> emit_orpo_recipe(const distill::Dataset& dataset,
                                     const std::string& base_model_id,
                                     const std::string& dataset_path);

Result<void> write_recipe(const TrainRecipe& recipe, const std::string& path);
Result<TrainRecipe> load_recipe(const std::string& path);

// Writes the dataset JSONL and returns its file checksum.
Result<std::string> export_dataset(const distill::Dataset& dataset, const std::string& out_path);

}  // namespace alignforge::trainplan
