#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alignforge/distill.hpp"
#include "alignforge/error.hpp"
#include "alignforge/llm_client.hpp"

namespace alignforge::evalkit {

enum class TaskId { arc_challenge, bbq_lite_json, truthfulqa_mc2 };

const char* to_string(TaskId task);
Result<TaskId> task_from_string(std::string_view s);

struct BenchmarkItem {
    TaskId task_id = TaskId::arc_challenge;
    std::string question;
    // Multiple choice (arc, bbq):
    std::vector<std::string> choices;
    int gold = -1;
    // truthfulqa:
    std::vector<std::string> true_answers;
    std::vector<std::string> false_answers;
    std::string category;
};

// Parses the task's published distribution files. arc: AI2 JSONL or
// HF-style JSONL records (a directory loads every *.jsonl in name order).
// bbq: BIG-bench task.json with target_scores, choice order preserved.
// truthfulqa: JSONL with mc2_targets, or the original CSV.
Result<std::vector<BenchmarkItem>> load_task(TaskId task, const std::string& path);

enum class EvalMode { loglikelihood_mc, generate_until };

const char* to_string(EvalMode mode);
Result<EvalMode> eval_mode_from_string(std::string_view s);

struct EvalConfig {
    TaskId task_id = TaskId::arc_challenge;
    EvalMode mode = EvalMode::loglikelihood_mc;
    std::string system_prompt_id = "baseline";
    // Required when system_prompt_id names no built-in prompt (e.g. a
    // RAG-tool prompt or any custom intervention).
    std::optional<std::string> custom_system_prompt;
    // Q&A pair appended by ai_principles_v2.
    std::optional<std::pair<std::string, std::string>> exemplar;
    std::optional<size_t> limit;
    int64_t seed = 0;
    double temperature = 0.7;
    std::string stop = "\n\n";
    int max_tokens = 256;
};

struct McScore {
    int chosen_index = -1;
    bool correct = false;
    bool correct_norm = false;  // argmax of loglikelihood / choice byte length
};

// Pure argmax step over per-choice loglikelihoods (ties -> lowest index).
Result<McScore> mc_score_from_loglikelihoods(const BenchmarkItem& item,
                                             const std::vector<double>& loglikelihoods);

// Scores every choice as " {choice}" against "Question: {q}\nAnswer:".
Result<McScore> score_multiple_choice(const BenchmarkItem& item, llm::Client& client);

// mc2 = sum of true-answer likelihoods over the total likelihood mass.
double mc2_from_loglikelihoods(const std::vector<double>& true_lls,
                               const std::vector<double>& false_lls);

Result<double> score_truthfulqa_mc2(const BenchmarkItem& item, llm::Client& client);

struct Extraction {
    std::optional<int> index;  // nullopt = abstain
    std::string rule;          // letter | full_text | token_overlap | abstain
};

// Rule cascade: standalone choice letter, unique full-text containment,
// then unique token-overlap >= 0.8. Never returns an out-of-range index.
Extraction extract_choice(const std::string& generation,
                          const std::vector<std::string>& choices);

struct GenerationOutcome {
    std::string generation;
    Extraction extraction;
    bool refused = false;
};

// chat_complete with system_instruction = system_prompt and the question
// (plus lettered choices when present) as the user message. Refusals are
// recorded as abstentions, not failures.
Result<GenerationOutcome> run_generate_until(const BenchmarkItem& item,
                                             const std::string& system_prompt,
                                             llm::Client& client, const EvalConfig& config);

// Corpus-style BLEU up to 4-grams, add-one smoothing on the higher-order
// precisions, brevity penalty against the closest reference length.
double bleu(const std::string& candidate, const std::vector<std::string>& references);

struct RougeScores {
    double rouge1_f = 0.0;
    double rouge2_f = 0.0;
    double rougeL_f = 0.0;
};

// F1 of unigram/bigram overlap and longest common subsequence, max over
// references per metric.
RougeScores rouge(const std::string& candidate, const std::vector<std::string>& references);

struct TqaGenAccuracy {
    bool bleu_acc = false;
    bool rouge1_acc = false;
};

// True iff the metric against the true answers strictly exceeds the metric
// against the false answers.
TqaGenAccuracy truthfulqa_gen_accuracy(const std::string& generation,
                                       const BenchmarkItem& item);

// Without an exemplar: the v1 alignment prompt (preamble plus every
// principle with its definition). With one: v1 plus the example preamble
// and the supplied pair.
std::string build_ica_prompt(
    const distill::PrinciplesDoc& principles,
    const std::optional<std::pair<std::string, std::string>>& exemplar);

// Resolves baseline / ai_principles_v1 / ai_principles_v2; any other id
// requires config.custom_system_prompt.
Result<std::string> resolve_system_prompt(const EvalConfig& config,
                                          const distill::PrinciplesDoc& principles);

// 100 * (score - baseline) / baseline.
Result<double> relative_improvement(double score, double baseline);
std::string format_percent(double percent);  // two decimals

struct EvalAggregates {
    size_t n_items = 0;
    size_t n_scored = 0;
    size_t n_errored = 0;
    size_t n_abstain = 0;
    std::optional<double> accuracy;
    std::optional<double> accuracy_norm;
    std::optional<double> mc2;
    std::optional<double> bleu_acc;
    std::optional<double> rouge1_acc;
};

struct EvalReport {
    EvalConfig config;
    std::string model_id;
    std::string system_prompt_digest;
    nlohmann::json per_item = nlohmann::json::array();
    EvalAggregates aggregates;

    nlohmann::json to_json() const;  // self-contained, deterministic
    std::string to_csv() const;      // flat aggregate row
};

Result<EvalReport> run_eval(const std::vector<BenchmarkItem>& items, const EvalConfig& config,
                            llm::Client& client, const distill::PrinciplesDoc& principles);

Result<EvalReport> report_from_json(const nlohmann::json& value);

// Recomputes aggregates from per-item records (the audit property).
EvalAggregates recompute_aggregates(const nlohmann::json& per_item);

// Relative-improvement columns for every aggregate present in both reports.
Result<nlohmann::json> baseline_deltas(const EvalReport& report, const EvalReport& baseline);

}  // namespace alignforge::evalkit
