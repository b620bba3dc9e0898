#include <algorithm>
#include <sstream>

#include "alignforge/evalkit.hpp"
#include "alignforge/hash.hpp"
#include "alignforge/log.hpp"

namespace alignforge::evalkit {

using nlohmann::json;

const char* to_string(EvalMode mode) {
    return mode == EvalMode::loglikelihood_mc ? "loglikelihood_mc" : "generate_until";
}

Result<EvalMode> eval_mode_from_string(std::string_view s) {
    if (s == "loglikelihood_mc" || s == "mc") return EvalMode::loglikelihood_mc;
    if (s == "generate_until" || s == "generate") return EvalMode::generate_until;
    return make_error(ErrorKind::usage, "unknown eval mode: " + std::string(s));
}

namespace {

json config_to_json(const EvalConfig& config) {
    return json{{"task", to_string(config.task_id)},
                {"mode", to_string(config.mode)},
                {"system_prompt_id", config.system_prompt_id},
                {"limit", config.limit ? json(*config.limit) : json(nullptr)},
                {"seed", config.seed},
                {"temperature", config.temperature},
                {"stop", config.stop},
                {"max_tokens", config.max_tokens}};
}

Result<EvalConfig> config_from_json(const json& value) {
    EvalConfig config;
    auto task = task_from_string(value.value("task", ""));
    if (!task.ok()) return task.error();
    config.task_id = task.value();
    auto mode = eval_mode_from_string(value.value("mode", ""));
    if (!mode.ok()) return mode.error();
    config.mode = mode.value();
    config.system_prompt_id = value.value("system_prompt_id", "baseline");
    if (value.contains("limit") && !value["limit"].is_null()) {
        config.limit = value["limit"].get<size_t>();
    }
    config.seed = value.value("seed", int64_t{0});
    config.temperature = value.value("temperature", 0.7);
    config.stop = value.value("stop", "\n\n");
    config.max_tokens = value.value("max_tokens", 256);
    return config;
}

void add_optional(json& node, const char* key, const std::optional<double>& value) {
    node[key] = value ? json(*value) : json(nullptr);
}

std::optional<double> get_optional(const json& node, const char* key) {
    if (!node.contains(key) || node[key].is_null()) return std::nullopt;
    return node[key].get<double>();
}

}  // namespace

EvalAggregates recompute_aggregates(const json& per_item) {
    EvalAggregates agg;
    agg.n_items = per_item.size();
    size_t correct = 0;
    size_t correct_norm = 0;
    size_t bleu_hits = 0;
    size_t rouge_hits = 0;
    size_t mc_records = 0;
    size_t gen_mc_records = 0;
    size_t tqa_gen_records = 0;
    double mc2_sum = 0.0;
    size_t mc2_records = 0;

    for (const auto& record : per_item) {
        if (record.value("errored", false)) {
            ++agg.n_errored;
            continue;
        }
        ++agg.n_scored;
        if (record.contains("mc2")) {
            mc2_sum += record["mc2"].get<double>();
            ++mc2_records;
        } else if (record.contains("correct") && record.contains("correct_norm")) {
            ++mc_records;
            if (record["correct"].get<bool>()) ++correct;
            if (record["correct_norm"].get<bool>()) ++correct_norm;
        } else if (record.contains("extracted")) {
            ++gen_mc_records;
            if (record["extracted"].is_null()) ++agg.n_abstain;
            if (record.value("correct", false)) ++correct;
        } else if (record.contains("bleu_acc")) {
            ++tqa_gen_records;
            if (record["bleu_acc"].get<bool>()) ++bleu_hits;
            if (record["rouge1_acc"].get<bool>()) ++rouge_hits;
        }
    }

    if (mc_records > 0) {
        agg.accuracy = static_cast<double>(correct) / static_cast<double>(mc_records);
        agg.accuracy_norm = static_cast<double>(correct_norm) / static_cast<double>(mc_records);
    }
    if (gen_mc_records > 0) {
        agg.accuracy = static_cast<double>(correct) / static_cast<double>(gen_mc_records);
    }
    if (mc2_records > 0) {
        agg.mc2 = mc2_sum / static_cast<double>(mc2_records);
    }
    if (tqa_gen_records > 0) {
        agg.bleu_acc = static_cast<double>(bleu_hits) / static_cast<double>(tqa_gen_records);
        agg.rouge1_acc = static_cast<double>(rouge_hits) / static_cast<double>(tqa_gen_records);
    }
    return agg;
}

json EvalReport::to_json() const {
    json agg;
    agg["n_items"] = aggregates.n_items;
    agg["n_scored"] = aggregates.n_scored;
    agg["n_errored"] = aggregates.n_errored;
    agg["n_abstain"] = aggregates.n_abstain;
    add_optional(agg, "accuracy", aggregates.accuracy);
    add_optional(agg, "accuracy_norm", aggregates.accuracy_norm);
    add_optional(agg, "mc2", aggregates.mc2);
    add_optional(agg, "bleu_acc", aggregates.bleu_acc);
    add_optional(agg, "rouge1_acc", aggregates.rouge1_acc);

    return json{{"config", config_to_json(config)},
                {"model_id", model_id},
                {"system_prompt_digest", system_prompt_digest},
                {"notes",
                 json{{"mc_context", "Question: {q}\\nAnswer:"},
                      {"bleu_smoothing", "add-one on orders 2-4"},
                      {"abstain_scoring", "incorrect"}}},
                {"per_item", per_item},
                {"aggregates", agg}};
}

Result<EvalReport> report_from_json(const json& value) {
    if (!value.is_object() || !value.contains("config") || !value.contains("aggregates")) {
        return make_error(ErrorKind::parse, "not an eval report (missing config/aggregates)");
    }
    EvalReport report;
    auto config = config_from_json(value["config"]);
    if (!config.ok()) return config.error();
    report.config = config.take();
    report.model_id = value.value("model_id", "");
    report.system_prompt_digest = value.value("system_prompt_digest", "");
    report.per_item = value.value("per_item", json::array());
    const json& agg = value["aggregates"];
    report.aggregates.n_items = agg.value("n_items", size_t{0});
    report.aggregates.n_scored = agg.value("n_scored", size_t{0});
    report.aggregates.n_errored = agg.value("n_errored", size_t{0});
    report.aggregates.n_abstain = agg.value("n_abstain", size_t{0});
    report.aggregates.accuracy = get_optional(agg, "accuracy");
    report.aggregates.accuracy_norm = get_optional(agg, "accuracy_norm");
    report.aggregates.mc2 = get_optional(agg, "mc2");
    report.aggregates.bleu_acc = get_optional(agg, "bleu_acc");
    report.aggregates.rouge1_acc = get_optional(agg, "rouge1_acc");
    return report;
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "task,mode,system_prompt_id,n_items,n_scored,n_errored,n_abstain,"
           "accuracy,accuracy_norm,mc2,bleu_acc,rouge1_acc\n";
    auto cell = [](const std::optional<double>& value) {
        if (!value) return std::string{};
        std::ostringstream s;
        s << *value;
        return s.str();
    };
    out << to_string(config.task_id) << ',' << to_string(config.mode) << ','
        << config.system_prompt_id << ',' << aggregates.n_items << ',' << aggregates.n_scored
        << ',' << aggregates.n_errored << ',' << aggregates.n_abstain << ','
        << cell(aggregates.accuracy) << ',' << cell(aggregates.accuracy_norm) << ','
        << cell(aggregates.mc2) << ',' << cell(aggregates.bleu_acc) << ','
        << cell(aggregates.rouge1_acc) << '\n';
    return out.str();
}

Result<EvalReport> run_eval(const std::vector<BenchmarkItem>& items, const EvalConfig& config,
                            llm::Client& client, const distill::PrinciplesDoc& principles) {
    if (items.empty()) {
        return make_error(ErrorKind::data, "no items to evaluate");
    }
    size_t n = items.size();
    if (config.limit && *config.limit < n) n = *config.limit;

    EvalReport report;
    report.config = config;
    report.model_id = client.config().model_id;

    if (config.mode == EvalMode::loglikelihood_mc) {
        report.system_prompt_digest = "";
        // Flatten all (item, continuation) pairs into one ordered batch.
        std::vector<llm::ScorePair> pairs;
        std::vector<size_t> item_offsets(n + 1, 0);
        for (size_t i = 0; i < n; ++i) {
            const BenchmarkItem& item = items[i];
            const std::string context = "Question: " + item.question + "\nAnswer:";
            if (item.task_id == TaskId::truthfulqa_mc2) {
                for (const auto& answer : item.true_answers) {
                    pairs.emplace_back(context, " " + answer);
                }
                for (const auto& answer : item.false_answers) {
                    pairs.emplace_back(context, " " + answer);
                }
            } else {
                for (const auto& choice : item.choices) {
                    pairs.emplace_back(context, " " + choice);
                }
            }
            item_offsets[i + 1] = pairs.size();
        }
        auto results = client.score_batch(pairs);

        for (size_t i = 0; i < n; ++i) {
            const BenchmarkItem& item = items[i];
            json record{{"index", i}};
            if (!item.category.empty()) record["category"] = item.category;

            std::vector<double> lls;
            bool errored = false;
            std::string error_message;
            for (size_t k = item_offsets[i]; k < item_offsets[i + 1]; ++k) {
                if (!results[k].ok()) {
                    errored = true;
                    error_message = results[k].error().describe();
                    break;
                }
                lls.push_back(results[k].value().loglikelihood);
            }
            if (errored) {
                record["errored"] = true;
                record["error"] = error_message;
                report.per_item.push_back(std::move(record));
                continue;
            }
            if (item.task_id == TaskId::truthfulqa_mc2) {
                std::vector<double> true_lls(lls.begin(),
                                             lls.begin() + item.true_answers.size());
                std::vector<double> false_lls(lls.begin() + item.true_answers.size(), lls.end());
                record["mc2"] = mc2_from_loglikelihoods(true_lls, false_lls);
            } else {
                auto score = mc_score_from_loglikelihoods(item, lls);
                if (!score.ok()) return score.error();
                record["loglikelihoods"] = lls;
                record["chosen_index"] = score.value().chosen_index;
                record["gold"] = item.gold;
                record["correct"] = score.value().correct;
                record["correct_norm"] = score.value().correct_norm;
            }
            report.per_item.push_back(std::move(record));
        }
    } else {
        auto system_prompt = resolve_system_prompt(config, principles);
        if (!system_prompt.ok()) return system_prompt.error();
        report.system_prompt_digest = sha256_hex(system_prompt.value());

        for (size_t i = 0; i < n; ++i) {
            const BenchmarkItem& item = items[i];
            json record{{"index", i}};
            if (!item.category.empty()) record["category"] = item.category;

            auto outcome = run_generate_until(item, system_prompt.value(), client, config);
            if (!outcome.ok()) {
                record["errored"] = true;
                record["error"] = outcome.error().describe();
                report.per_item.push_back(std::move(record));
                continue;
            }
            const GenerationOutcome& gen = outcome.value();
            record["generation"] = gen.generation;
            record["refused"] = gen.refused;
            if (item.task_id == TaskId::truthfulqa_mc2) {
                auto acc = truthfulqa_gen_accuracy(gen.generation, item);
                record["bleu_acc"] = acc.bleu_acc;
                record["rouge1_acc"] = acc.rouge1_acc;
            } else {
                record["extracted"] =
                    gen.extraction.index ? json(*gen.extraction.index) : json(nullptr);
                record["extraction_rule"] = gen.extraction.rule;
                record["gold"] = item.gold;
                record["correct"] =
                    gen.extraction.index.has_value() && *gen.extraction.index == item.gold;
            }
            report.per_item.push_back(std::move(record));
        }
    }

    report.aggregates = recompute_aggregates(report.per_item);
    return report;
}

Result<json> baseline_deltas(const EvalReport& report, const EvalReport& baseline) {
    json deltas = json::object();
    auto add_delta = [&deltas](const char* key, const std::optional<double>& score,
                               const std::optional<double>& base) -> Result<void> {
        if (!score || !base) return {};
        auto delta = relative_improvement(*score, *base);
        if (!delta.ok()) return delta.error();
        deltas[key] = json{{"score", *score},
                           {"baseline", *base},
                           {"relative_pct", delta.value()},
                           {"relative_pct_str", format_percent(delta.value())}};
        return {};
    };
    if (auto r = add_delta("accuracy", report.aggregates.accuracy, baseline.aggregates.accuracy);
        !r.ok()) {
        return r.error();
    }
    if (auto r = add_delta("accuracy_norm", report.aggregates.accuracy_norm,
                           baseline.aggregates.accuracy_norm);
        !r.ok()) {
        return r.error();
    }
    if (auto r = add_delta("mc2", report.aggregates.mc2, baseline.aggregates.mc2); !r.ok()) {
        return r.error();
    }
    if (auto r = add_delta("bleu_acc", report.aggregates.bleu_acc, baseline.aggregates.bleu_acc);
        !r.ok()) {
        return r.error();
    }
    if (auto r = add_delta("rouge1_acc", report.aggregates.rouge1_acc,
                           baseline.aggregates.rouge1_acc);
        !r.ok()) {
        return r.error();
    }
    return deltas;
}

}  // namespace alignforge::evalkit
