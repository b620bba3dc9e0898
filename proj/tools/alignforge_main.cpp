// alignforge: synthetic alignment-dataset pipeline, dataset analysis,
// benchmark evaluation, and training-recipe export.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "alignforge/assets.hpp"
#include "alignforge/corpus.hpp"
#include "alignforge/distill.hpp"
#include "alignforge/evalkit.hpp"
#include "alignforge/hash.hpp"
#include "alignforge/jsonl.hpp"
#include "alignforge/llm_client.hpp"
#include "alignforge/metrics.hpp"
#include "alignforge/mock_backend.hpp"
#include "alignforge/trainplan.hpp"
#include "alignforge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace alignforge;

namespace {

// Exit-code contract: 0 success, 1 usage/config, 2 data/validation,
// 3 transport/capability.
int exit_code_for(const Error& error) {
    switch (error.kind) {
        case ErrorKind::usage: return 1;
        case ErrorKind::data:
        case ErrorKind::parse: return 2;
        default: return 3;
    }
}

[[noreturn]] void fail(const Error& error) {
    std::cerr << "error: " << error.describe() << "\n";
    std::exit(exit_code_for(error));
}

struct RunConfig {
    llm::EndpointConfig endpoint;
    std::string corpus_path;
    std::string principles_path;
    std::string exemplars_path;
    std::string output_dir = ".";
    int64_t seed = 0;
    double temperature = 0.7;
    std::optional<std::string> mock_fixtures;
    std::optional<std::string> mock_logprobs;
    bool dry_run = false;
};

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(make_error(ErrorKind::usage, "cannot open config: " + path));
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) fail(make_error(ErrorKind::usage, "malformed config: " + path));

    if (parsed.contains("endpoint")) {
        const json& ep = parsed["endpoint"];
        config.endpoint.base_url = ep.value("base_url", config.endpoint.base_url);
        config.endpoint.model_id = ep.value("model_id", config.endpoint.model_id);
        config.endpoint.api_key_ref = ep.value("api_key_ref", config.endpoint.api_key_ref);
        config.endpoint.timeout_seconds =
            ep.value("timeout_seconds", config.endpoint.timeout_seconds);
        config.endpoint.max_parallel = ep.value("max_parallel", config.endpoint.max_parallel);
        config.endpoint.max_retries = ep.value("max_retries", config.endpoint.max_retries);
        config.endpoint.backoff_base_ms =
            ep.value("backoff_base_ms", config.endpoint.backoff_base_ms);
    }
    config.corpus_path = parsed.value("corpus_path", config.corpus_path);
    config.principles_path = parsed.value("principles_path", config.principles_path);
    config.exemplars_path = parsed.value("exemplars_path", config.exemplars_path);
    config.output_dir = parsed.value("output_dir", config.output_dir);
    config.seed = parsed.value("seed", config.seed);
    config.temperature = parsed.value("temperature", config.temperature);
    if (parsed.contains("mock_fixtures")) {
        config.mock_fixtures = parsed["mock_fixtures"].get<std::string>();
    }
    if (parsed.contains("mock_logprobs")) {
        config.mock_logprobs = parsed["mock_logprobs"].get<std::string>();
    }
}

llm::Client make_client(const RunConfig& config) {
    std::shared_ptr<llm::Backend> backend;
    if (config.mock_fixtures) {
        std::optional<std::string> logprobs = config.mock_logprobs;
        if (!logprobs) {
            std::string sibling = *config.mock_fixtures + ".logprobs.json";
            if (fs::exists(sibling)) logprobs = sibling;
        }
        auto mock = llm::MockBackend::from_files(*config.mock_fixtures, logprobs);
        if (!mock.ok()) fail(mock.error());
        backend = mock.value();
    } else {
        backend = llm::make_http_backend();
    }
    return llm::Client(config.endpoint, backend, static_cast<uint64_t>(config.seed));
}

void ensure_output_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) fail(make_error(ErrorKind::usage, "cannot create output dir: " + config.output_dir));
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
}

void write_manifest(const std::string& for_path, json fields) {
    fields["tool_version"] = kVersion;
    std::ofstream out(for_path + ".manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) fail(make_error(ErrorKind::data, "cannot write manifest for " + for_path));
    out << fields.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(make_error(ErrorKind::data, "cannot write " + path));
    out << content;
}

distill::PrinciplesDoc load_principles_or_bundled(const RunConfig& config) {
    if (config.principles_path.empty()) return distill::bundled_principles();
    auto loaded = distill::load_principles(config.principles_path);
    if (!loaded.ok()) fail(loaded.error());
    return loaded.value();
}

distill::ExemplarPair load_exemplars_or_bundled(const RunConfig& config) {
    if (config.exemplars_path.empty()) {
        std::cerr << "note: using bundled placeholder exemplars (smoke-test quality); "
                     "pass --exemplars for real runs\n";
        return distill::bundled_placeholder_exemplars();
    }
    auto loaded = distill::load_exemplars(config.exemplars_path);
    if (!loaded.ok()) fail(loaded.error());
    return loaded.value();
}

// Text content of one corpus document or dataset sample, for the
// information-theoretic metrics.
Result<std::vector<std::pair<std::string, std::string>>> texts_with_ids(
    const std::string& path) {
    auto records = jsonl::read_file(path);
    if (!records.ok()) return records.error();
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& record : records.value()) {
        const json& value = record.value;
        std::string id = std::to_string(record.line_number);
        std::string text;
        if (value.contains("body")) {
            id = value.value("id", id);
            text = value["body"].get<std::string>();
        } else if (value.contains("messages")) {
            if (value.contains("meta")) id = value["meta"].value("source_doc_id", id);
            for (const auto& msg : value["messages"]) {
                if (!text.empty()) text += "\n";
                text += msg.value("content", "");
            }
        } else if (value.contains("chosen")) {
            if (value.contains("meta")) id = value["meta"].value("source_doc_id", id);
            for (const auto& msg : value["chosen"]) {
                if (!text.empty()) text += "\n";
                text += msg.value("content", "");
            }
        } else {
            return make_error(ErrorKind::parse,
                              path + ":" + std::to_string(record.line_number) +
                                  ": neither a corpus document nor a dataset sample");
        }
        if (!text.empty()) out.emplace_back(std::move(id), std::move(text));
    }
    if (out.empty()) return make_error(ErrorKind::data, "no usable texts in " + path);
    return out;
}

json metrics_report_entry(const std::string& metric, const std::string& unit,
                          const std::string& estimator, double value, double raw_value,
                          json inputs, json params) {
    return json{{"metric", metric},       {"unit", unit},
                {"estimator_version", estimator}, {"value", value},
                {"raw_value", raw_value}, {"inputs", std::move(inputs)},
                {"params", std::move(params)}};
}

// --- subcommand implementations -------------------------------------------

int cmd_ingest(const RunConfig& config, const std::string& format_name) {
    corpus::IngestFormat format = corpus::IngestFormat::auto_detect;
    if (format_name == "jsonl") format = corpus::IngestFormat::jsonl;
    if (format_name == "textdir") format = corpus::IngestFormat::text_dir;

    if (config.corpus_path.empty()) {
        fail(make_error(ErrorKind::usage, "ingest needs --corpus <path>"));
    }
    auto store = corpus::ingest_documents(config.corpus_path, format);
    if (!store.ok()) fail(store.error());
    ensure_output_dir(config);

    const std::string store_path = out_path(config, "corpus.jsonl");
    if (auto saved = corpus::save_store(store.value(), store_path); !saved.ok()) {
        fail(saved.error());
    }
    write_manifest(store_path, json{{"input_path", config.corpus_path},
                                    {"document_count", store.value().documents.size()},
                                    {"input_record_count", store.value().input_record_count},
                                    {"duplicates_removed", store.value().duplicate_count},
                                    {"corpus_checksum", store.value().corpus_checksum()},
                                    {"seed", config.seed}});
    std::cout << "ingested " << store.value().documents.size() << " documents ("
              << store.value().duplicate_count << " duplicates removed) -> " << store_path
              << "\n";
    return 0;
}

int cmd_forge(RunConfig& config, const std::string& stage, const std::string& input_path) {
    ensure_output_dir(config);
    distill::GenerateOptions options;
    options.temperature = config.temperature;
    options.seed = config.seed;

    if (stage == "sft") {
        const std::string store_path =
            input_path.empty() ? out_path(config, "corpus.jsonl") : input_path;
        auto store = corpus::load_store(store_path);
        if (!store.ok()) fail(store.error());

        if (config.dry_run) {
            std::vector<json> requests;
            for (const auto& doc : store.value().documents) {
                auto prompt = distill::render_sft_prompt(doc);
                if (!prompt.ok()) fail(prompt.error());
                std::vector<llm::ChatMessage> messages{
                    llm::ChatMessage{llm::Role::user, prompt.value()}};
                requests.push_back(json{{"digest", llm::request_digest(messages)},
                                        {"doc_id", doc.id},
                                        {"temperature", options.temperature},
                                        {"messages", json::array({json{
                                             {"role", "user"}, {"content", prompt.value()}}})}});
            }
            const std::string dry_path = out_path(config, "dryrun_sft_requests.jsonl");
            if (auto written = jsonl::write_file(dry_path, requests); !written.ok()) {
                fail(written.error());
            }
            std::cout << "dry run: " << requests.size() << " requests -> " << dry_path << "\n";
            return 0;
        }

        auto client = make_client(config);
        auto dataset = distill::generate_sft_dataset(store.value(), client, options);
        if (!dataset.ok()) fail(dataset.error());
        const std::string dataset_path = out_path(config, "sft_dataset.jsonl");
        if (auto saved = distill::save_dataset(dataset.value(), dataset_path); !saved.ok()) {
            fail(saved.error());
        }
        const auto& manifest = dataset.value().manifest;
        std::cout << "forge sft: requested " << manifest.requested_count << ", produced "
                  << manifest.sample_count << ", skipped " << manifest.skip_count << " -> "
                  << dataset_path << "\n";
        if (manifest.sample_count * 10 < manifest.requested_count * 9) {
            std::cerr << "error: produced fewer than 90% of requested samples\n";
            return 2;
        }
        return 0;
    }

    if (stage == "po") {
        const std::string sft_path =
            input_path.empty() ? out_path(config, "sft_dataset.jsonl") : input_path;
        if (!fs::exists(sft_path)) {
            fail(make_error(ErrorKind::data,
                            "po stage needs the sft dataset first (missing " + sft_path + ")"));
        }
        auto sft = distill::load_dataset(sft_path);
        if (!sft.ok()) fail(sft.error());
        auto principles = load_principles_or_bundled(config);
        auto exemplars = load_exemplars_or_bundled(config);

        if (config.dry_run) {
            std::vector<json> requests;
            for (const auto& sample : sft.value().sft) {
                distill::QAPair qa;
                qa.question = sample.messages[sample.messages.size() - 2].content;
                qa.answer = sample.messages.back().content;
                for (auto polarity : {distill::Polarity::chosen, distill::Polarity::rejected}) {
                    std::string prompt =
                        distill::render_po_prompt(qa, exemplars, principles, polarity);
                    std::vector<llm::ChatMessage> messages{
                        llm::ChatMessage{llm::Role::user, prompt}};
                    requests.push_back(json{
                        {"digest", llm::request_digest(messages)},
                        {"polarity", polarity == distill::Polarity::chosen ? "chosen" : "rejected"},
                        {"source_doc_id", sample.source_doc_id},
                        {"messages",
                         json::array({json{{"role", "user"}, {"content", prompt}}})}});
                }
            }
            const std::string dry_path = out_path(config, "dryrun_po_requests.jsonl");
            if (auto written = jsonl::write_file(dry_path, requests); !written.ok()) {
                fail(written.error());
            }
            std::cout << "dry run: " << requests.size() << " requests -> " << dry_path << "\n";
            return 0;
        }

        auto client = make_client(config);
        auto dataset =
            distill::generate_po_dataset(sft.value(), exemplars, principles, client, options);
        if (!dataset.ok()) fail(dataset.error());
        const std::string dataset_path = out_path(config, "po_dataset.jsonl");
        if (auto saved = distill::save_dataset(dataset.value(), dataset_path); !saved.ok()) {
            fail(saved.error());
        }
        const auto& manifest = dataset.value().manifest;
        std::cout << "forge po: requested " << manifest.requested_count << ", produced "
                  << manifest.sample_count << ", skipped " << manifest.skip_count << " -> "
                  << dataset_path << "\n";
        if (manifest.sample_count * 10 < manifest.requested_count * 9) {
            std::cerr << "error: produced fewer than 90% of requested samples\n";
            return 2;
        }
        return 0;
    }

    fail(make_error(ErrorKind::usage, "forge stage must be sft or po"));
}

int cmd_sample_control(const RunConfig& config, const std::string& input_path, size_t n) {
    auto dataset = distill::load_dataset(input_path);
    if (!dataset.ok()) fail(dataset.error());
    auto sampled =
        distill::sample_control_dataset(dataset.value(), n, static_cast<uint64_t>(config.seed));
    if (!sampled.ok()) fail(sampled.error());
    ensure_output_dir(config);
    const std::string out = out_path(config, "control_dataset.jsonl");
    if (auto saved = distill::save_dataset(sampled.value(), out); !saved.ok()) {
        fail(saved.error());
    }
    std::cout << "sampled " << n << " of " << dataset.value().size() << " -> " << out << "\n";
    return 0;
}

int cmd_analyze_entropy(const RunConfig& config, const std::vector<std::string>& inputs,
                        metrics::TokenUnit unit) {
    ensure_output_dir(config);
    json entries = json::array();
    std::cout << "Dataset                        Avg. Shannon Entropy   Std Dev.\n";
    for (const auto& input : inputs) {
        auto texts = texts_with_ids(input);
        if (!texts.ok()) fail(texts.error());
        std::vector<std::string> bodies;
        bodies.reserve(texts.value().size());
        for (auto& [id, text] : texts.value()) bodies.push_back(text);
        auto stats = metrics::corpus_entropy_stats(bodies, unit);
        if (!stats.ok()) fail(stats.error());

        char row[160];
        std::snprintf(row, sizeof(row), "%-30s %.3f                  %.3f\n",
                      fs::path(input).filename().string().c_str(), stats.value().mean,
                      stats.value().stddev);
        std::cout << row;
        entries.push_back(metrics_report_entry(
            "shannon_entropy_normalized", metrics::to_string(unit),
            metrics::kEntropyEstimatorVersion, stats.value().mean, stats.value().mean,
            json{{"path", input}, {"checksum", sha256_file_hex(input)},
                 {"documents", bodies.size()}},
            json{{"stddev", stats.value().stddev},
                 {"per_document", stats.value().per_document}}));
    }
    const std::string report_path = out_path(config, "entropy_report.json");
    write_text_file(report_path, entries.dump(2) + "\n");
    write_manifest(report_path, json{{"inputs", inputs}, {"seed", config.seed}});
    std::cout << "report -> " << report_path << "\n";
    return 0;
}

int cmd_analyze_mi(const RunConfig& config, const std::string& corpus_path,
                   const std::string& dataset_path, metrics::TokenUnit unit) {
    auto corpus_texts = texts_with_ids(corpus_path);
    if (!corpus_texts.ok()) fail(corpus_texts.error());
    auto dataset_texts = texts_with_ids(dataset_path);
    if (!dataset_texts.ok()) fail(dataset_texts.error());

    std::map<std::string, std::string> by_id;
    for (auto& [id, text] : corpus_texts.value()) by_id[id] = text;
    std::vector<std::pair<std::string, std::string>> pairs;
    size_t unmatched = 0;
    for (auto& [id, text] : dataset_texts.value()) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            ++unmatched;
            continue;
        }
        pairs.emplace_back(it->second, text);
    }
    if (pairs.empty()) {
        fail(make_error(ErrorKind::data,
                        "no dataset samples could be paired with corpus documents by id"));
    }
    auto mi = metrics::mutual_information_normalized(pairs, unit);
    if (!mi.ok()) fail(mi.error());

    ensure_output_dir(config);
    std::cout << "Datasets         Mutual Information\n";
    char row[120];
    std::snprintf(row, sizeof(row), "%-16s %.3f\n", "corpus/dataset", mi.value());
    std::cout << row;
    if (unmatched > 0) {
        std::cout << "(" << unmatched << " samples had no matching corpus document)\n";
    }
    json entry = metrics_report_entry(
        "mutual_information_normalized", metrics::to_string(unit),
        metrics::kMiEstimatorVersion, mi.value(), mi.value(),
        json{{"corpus", corpus_path}, {"dataset", dataset_path}, {"pairs", pairs.size()}},
        json{{"normalization", "min_marginal_entropy"}, {"unmatched", unmatched}});
    const std::string report_path = out_path(config, "mi_report.json");
    write_text_file(report_path, entry.dump(2) + "\n");
    write_manifest(report_path,
                   json{{"inputs", json::array({corpus_path, dataset_path})},
                        {"seed", config.seed}});
    std::cout << "report -> " << report_path << "\n";
    return 0;
}

int cmd_analyze_kl(const RunConfig& config, const std::string& p_path, const std::string& q_path,
                   metrics::TokenUnit unit, double alpha) {
    auto build = [&unit](const std::string& path) {
        auto texts = texts_with_ids(path);
        if (!texts.ok()) fail(texts.error());
        std::vector<std::string> bodies;
        for (auto& [id, text] : texts.value()) bodies.push_back(text);
        auto dist = metrics::build_distribution(bodies, unit);
        if (!dist.ok()) fail(dist.error());
        return dist.take();
    };
    auto p = build(p_path);
    auto q = build(q_path);
    auto kl = metrics::kl_divergence_normalized(p, q, alpha);

    ensure_output_dir(config);
    char row[160];
    std::snprintf(row, sizeof(row), "KL-Divergence: %.3f (raw %.6f nats, alpha=%.2f)\n",
                  kl.normalized, kl.raw_nats, alpha);
    std::cout << row;
    json entry = metrics_report_entry(
        "kl_divergence_normalized", metrics::to_string(unit), metrics::kKlEstimatorVersion,
        kl.normalized, kl.raw_nats,
        json{{"p", p_path}, {"q", q_path}},
        json{{"alpha", alpha}, {"normalization", "1-exp(-kl)"}});
    const std::string report_path = out_path(config, "kl_report.json");
    write_text_file(report_path, entry.dump(2) + "\n");
    write_manifest(report_path,
                   json{{"inputs", json::array({p_path, q_path})}, {"seed", config.seed}});
    std::cout << "report -> " << report_path << "\n";
    return 0;
}

int cmd_analyze_ppl(RunConfig& config, const std::string& dataset_path,
                    const std::string& format_name) {
    auto format = metrics::ppl_format_from_string(format_name);
    if (!format.ok()) fail(format.error());
    auto dataset = distill::load_dataset(dataset_path);
    if (!dataset.ok()) fail(dataset.error());

    if (config.dry_run) {
        ensure_output_dir(config);
        std::vector<json> requests;
        for (size_t i = 0; i < dataset.value().size(); ++i) {
            const auto& messages = format.value() == metrics::PplFormat::messages
                                       ? dataset.value().sft[i].messages
                                   : format.value() == metrics::PplFormat::chosen
                                       ? dataset.value().po[i].chosen
                                       : dataset.value().po[i].rejected;
            auto rendered = trainplan::render_chat_template(messages);
            if (!rendered.ok()) fail(rendered.error());
            requests.push_back(json{{"context", ""}, {"continuation", rendered.value()}});
        }
        const std::string dry_path = out_path(config, "dryrun_ppl_requests.jsonl");
        if (auto written = jsonl::write_file(dry_path, requests); !written.ok()) {
            fail(written.error());
        }
        std::cout << "dry run: " << requests.size() << " scoring requests -> " << dry_path
                  << "\n";
        return 0;
    }

    auto client = make_client(config);
    auto report = metrics::dataset_perplexity(dataset.value(), format.value(), client,
                                              fs::path(dataset_path).stem().string());
    if (!report.ok()) {
        if (report.error().kind == ErrorKind::capability) {
            std::cerr << "hint: point --mock at fixtures with a logprob table, or use an "
                         "endpoint that supports echo+logprobs completions\n";
        }
        fail(report.error());
    }
    ensure_output_dir(config);
    std::cout << "Dataset                        Format     Mean ppl\n";
    char row[160];
    std::snprintf(row, sizeof(row), "%-30s %-10s %.4f\n", report.value().dataset_id.c_str(),
                  report.value().format.c_str(), report.value().mean_ppl);
    std::cout << row;

    json entry = metrics_report_entry(
        "dataset_perplexity", "token", metrics::kPplEstimatorVersion, report.value().mean_ppl,
        report.value().mean_ppl,
        json{{"dataset", dataset_path}, {"checksum", sha256_file_hex(dataset_path)},
             {"model_id", report.value().model_id}, {"format", report.value().format}},
        json{{"scored_token_total", report.value().scored_token_total},
             {"failed_samples", report.value().failed_samples},
             {"per_sample_ppl", report.value().per_sample_ppl},
             {"masking", "none"}});
    const std::string report_path = out_path(config, "ppl_report.json");
    write_text_file(report_path, entry.dump(2) + "\n");
    write_manifest(report_path, json{{"inputs", json::array({dataset_path})},
                                     {"seed", config.seed},
                                     {"model_id", report.value().model_id}});
    std::cout << "report -> " << report_path << "\n";
    return 0;
}

struct EvalCliArgs {
    std::string task;
    std::string task_path;
    std::string mode = "loglikelihood_mc";
    std::string system_prompt_id = "baseline";
    std::string system_prompt_file;
    std::string baseline_report;
    size_t limit = 0;
    std::string stop = "\n\n";
    int max_tokens = 256;
};

int cmd_eval(RunConfig& config, const EvalCliArgs& args) {
    evalkit::EvalConfig eval_config;
    auto task = evalkit::task_from_string(args.task);
    if (!task.ok()) fail(task.error());
    eval_config.task_id = task.value();
    auto mode = evalkit::eval_mode_from_string(args.mode);
    if (!mode.ok()) fail(mode.error());
    eval_config.mode = mode.value();
    eval_config.system_prompt_id = args.system_prompt_id;
    eval_config.seed = config.seed;
    eval_config.temperature = config.temperature;
    eval_config.stop = args.stop;
    eval_config.max_tokens = args.max_tokens;
    if (args.limit > 0) eval_config.limit = args.limit;
    if (!args.system_prompt_file.empty()) {
        std::ifstream in(args.system_prompt_file);
        if (!in) {
            fail(make_error(ErrorKind::usage,
                            "cannot open system prompt file: " + args.system_prompt_file));
        }
        eval_config.custom_system_prompt.emplace(std::istreambuf_iterator<char>(in),
                                                 std::istreambuf_iterator<char>());
    }
    if (!config.exemplars_path.empty()) {
        auto exemplars = distill::load_exemplars(config.exemplars_path);
        if (!exemplars.ok()) fail(exemplars.error());
        eval_config.exemplar = {exemplars.value().q1, exemplars.value().a1};
    } else if (eval_config.system_prompt_id == "ai_principles_v2") {
        auto bundled = distill::bundled_placeholder_exemplars();
        eval_config.exemplar = {bundled.q1, bundled.a1};
    }

    auto items = evalkit::load_task(eval_config.task_id, args.task_path);
    if (!items.ok()) fail(items.error());
    std::cout << "loaded " << items.value().size() << " items for "
              << evalkit::to_string(eval_config.task_id) << "\n";

    auto principles = load_principles_or_bundled(config);

    if (config.dry_run) {
        ensure_output_dir(config);
        auto prompt = evalkit::resolve_system_prompt(eval_config, principles);
        json dry{{"task", evalkit::to_string(eval_config.task_id)},
                 {"mode", evalkit::to_string(eval_config.mode)},
                 {"items", items.value().size()},
                 {"system_prompt",
                  prompt.ok() ? json(prompt.value()) : json(nullptr)}};
        const std::string dry_path = out_path(config, "dryrun_eval.json");
        write_text_file(dry_path, dry.dump(2) + "\n");
        std::cout << "dry run -> " << dry_path << "\n";
        return 0;
    }

    auto client = make_client(config);
    auto report = evalkit::run_eval(items.value(), eval_config, client, principles);
    if (!report.ok()) fail(report.error());

    json output = report.value().to_json();
    if (!args.baseline_report.empty()) {
        std::ifstream in(args.baseline_report);
        if (!in) {
            fail(make_error(ErrorKind::usage,
                            "cannot open baseline report: " + args.baseline_report));
        }
        json baseline_json = json::parse(in, nullptr, false);
        if (baseline_json.is_discarded()) {
            fail(make_error(ErrorKind::parse, "malformed baseline report"));
        }
        auto baseline = evalkit::report_from_json(baseline_json);
        if (!baseline.ok()) fail(baseline.error());
        auto deltas = evalkit::baseline_deltas(report.value(), baseline.value());
        if (!deltas.ok()) fail(deltas.error());
        output["baseline_deltas"] = deltas.value();
        for (const auto& [key, delta] : deltas.value().items()) {
            std::cout << key << ": " << delta["score"].get<double>() << " vs baseline "
                      << delta["baseline"].get<double>() << " -> "
                      << delta["relative_pct_str"].get<std::string>() << "%\n";
        }
    }

    ensure_output_dir(config);
    const std::string stem = std::string("eval_") + evalkit::to_string(eval_config.task_id) +
                             "_" + evalkit::to_string(eval_config.mode) + "_" +
                             eval_config.system_prompt_id;
    const std::string report_path = out_path(config, stem + ".json");
    write_text_file(report_path, output.dump(2) + "\n");
    write_text_file(out_path(config, stem + ".csv"), report.value().to_csv());
    write_manifest(report_path, json{{"task_path", args.task_path},
                                     {"seed", config.seed},
                                     {"model_id", report.value().model_id},
                                     {"system_prompt_digest",
                                      report.value().system_prompt_digest}});

    const auto& agg = report.value().aggregates;
    std::cout << "scored " << agg.n_scored << "/" << agg.n_items << " items";
    if (agg.accuracy) std::cout << ", accuracy " << *agg.accuracy;
    if (agg.accuracy_norm) std::cout << ", accuracy_norm " << *agg.accuracy_norm;
    if (agg.mc2) std::cout << ", mc2 " << *agg.mc2;
    if (agg.bleu_acc) std::cout << ", bleu_acc " << *agg.bleu_acc;
    if (agg.rouge1_acc) std::cout << ", rouge1_acc " << *agg.rouge1_acc;
    std::cout << " -> " << report_path << "\n";
    return 0;
}

int cmd_export_train(RunConfig& config, const std::string& stage,
                     const std::string& dataset_path, const std::string& base_model) {
    auto dataset = distill::load_dataset(dataset_path);
    if (!dataset.ok()) fail(dataset.error());
    ensure_output_dir(config);

    const std::string export_path = out_path(config, "train_" + stage + "_dataset.jsonl");
    auto checksum = trainplan::export_dataset(dataset.value(), export_path);
    if (!checksum.ok()) fail(checksum.error());

    Result<trainplan::TrainRecipe> recipe =
        stage == "sft" ? trainplan::emit_sft_recipe(dataset.value(), base_model, export_path)
        : stage == "orpo"
            ? trainplan::emit_orpo_recipe(dataset.value(), base_model, export_path)
            : Result<trainplan::TrainRecipe>(
                  make_error(ErrorKind::usage, "stage must be sft or orpo"));
    if (!recipe.ok()) fail(recipe.error());

    const std::string recipe_path = out_path(config, "recipe_" + stage + ".json");
    if (auto written = trainplan::write_recipe(recipe.value(), recipe_path); !written.ok()) {
        fail(written.error());
    }
    write_manifest(recipe_path, json{{"dataset", dataset_path},
                                     {"export", export_path},
                                     {"export_checksum", checksum.value()},
                                     {"seed", config.seed}});
    std::cout << "recipe: stage " << trainplan::to_string(recipe.value().stage) << ", epochs "
              << recipe.value().epochs << ", qlora dropout " << recipe.value().qlora.dropout
              << " rank " << recipe.value().qlora.rank << " alpha " << recipe.value().qlora.alpha
              << " ratio " << recipe.value().qlora.ratio() << " -> " << recipe_path << "\n";
    std::cout << "dataset export (" << dataset.value().size() << " samples) -> " << export_path
              << "\n";
    return 0;
}

int cmd_report(const RunConfig& config, const std::string& report_path,
               const std::string& baseline_path) {
    std::ifstream in(report_path);
    if (!in) fail(make_error(ErrorKind::usage, "cannot open report: " + report_path));
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) fail(make_error(ErrorKind::parse, "malformed report"));
    auto report = evalkit::report_from_json(parsed);
    if (!report.ok()) fail(report.error());

    std::cout << report.value().to_csv();
    if (!baseline_path.empty()) {
        std::ifstream base_in(baseline_path);
        if (!base_in) fail(make_error(ErrorKind::usage, "cannot open baseline report"));
        json base_json = json::parse(base_in, nullptr, false);
        if (base_json.is_discarded()) fail(make_error(ErrorKind::parse, "malformed baseline"));
        auto baseline = evalkit::report_from_json(base_json);
        if (!baseline.ok()) fail(baseline.error());
        auto deltas = evalkit::baseline_deltas(report.value(), baseline.value());
        if (!deltas.ok()) fail(deltas.error());
        for (const auto& [key, delta] : deltas.value().items()) {
            std::cout << key << " relative improvement: "
                      << delta["relative_pct_str"].get<std::string>() << "%\n";
        }
    }
    ensure_output_dir(config);
    const std::string csv_path = out_path(config, "report_aggregates.csv");
    write_text_file(csv_path, report.value().to_csv());
    return 0;
}

int cmd_render_template(const std::string& messages_path) {
    std::ifstream in(messages_path);
    if (!in) fail(make_error(ErrorKind::usage, "cannot open messages file: " + messages_path));
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) {
        fail(make_error(ErrorKind::parse, "messages file must hold a JSON array"));
    }
    std::vector<llm::ChatMessage> messages;
    for (const auto& node : parsed) {
        auto role = llm::role_from_string(node.value("role", ""));
        if (!role.ok()) fail(role.error());
        messages.push_back(llm::ChatMessage{role.value(), node.value("content", "")});
    }
    auto rendered = trainplan::render_chat_template(messages);
    if (!rendered.ok()) fail(rendered.error());
    std::cout << rendered.value();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alignforge: alignment dataset pipeline, metrics, and benchmark evaluation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    // Global flags may appear after the subcommand.
    app.fallthrough();

    RunConfig config;
    std::string config_file;
    std::string mock_fixtures;
    std::string mock_logprobs;
    app.add_option("--config", config_file, "Run configuration JSON (flags win over it)");
    app.add_option("--seed", config.seed, "Seed recorded in manifests and used for sampling");
    app.add_option("--endpoint-url", config.endpoint.base_url, "Model endpoint base URL");
    app.add_option("--model", config.endpoint.model_id, "Model id sent to the endpoint");
    app.add_option("--temperature", config.temperature, "Sampling temperature (default 0.7)");
    app.add_option("--mock", mock_fixtures, "Mock backend fixtures JSONL (no network)");
    app.add_option("--mock-logprobs", mock_logprobs, "Mock logprob table JSON");
    app.add_option("--output-dir", config.output_dir, "Directory for outputs and manifests");
    app.add_option("--principles", config.principles_path, "Principles JSON file");
    app.add_option("--exemplars", config.exemplars_path, "Exemplar Q/A pairs JSON file");
    app.add_flag("--dry-run", config.dry_run, "Emit the exact requests, make no calls");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Ingest a document corpus");
    std::string ingest_format = "auto";
    ingest->add_option("--corpus", config.corpus_path, "Corpus JSONL file or .txt directory");
    ingest->add_option("--format", ingest_format, "jsonl|textdir|auto");

    // forge
    auto* forge = app.add_subcommand("forge", "Generate sft or po datasets");
    std::string forge_stage;
    std::string forge_input;
    forge->add_option("stage", forge_stage, "sft|po")->required();
    forge->add_option("--input", forge_input, "Corpus store (sft) or sft dataset (po)");

    // sample-control
    auto* sample = app.add_subcommand("sample-control", "Deterministic control subsampling");
    std::string sample_input;
    size_t sample_n = 897;
    sample->add_option("--input", sample_input, "Dataset JSONL")->required();
    sample->add_option("--n", sample_n, "Samples to draw (default 897)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Dataset metrics");
    std::string analyze_metric;
    std::string analyze_unit = "word";
    std::vector<std::string> analyze_inputs;
    std::string analyze_corpus;
    std::string analyze_dataset;
    std::string analyze_format = "messages";
    double analyze_alpha = 0.5;
    analyze->add_option("metric", analyze_metric, "entropy|mi|kl|ppl")->required();
    analyze->add_option("--input", analyze_inputs, "Input corpus/dataset files (entropy)");
    analyze->add_option("--corpus", analyze_corpus, "Corpus store (mi)");
    analyze->add_option("--dataset", analyze_dataset, "Dataset (mi, ppl)");
    analyze->add_option("--input-p", analyze_corpus, "P-side input (kl)");
    analyze->add_option("--input-q", analyze_dataset, "Q-side input (kl)");
    analyze->add_option("--unit", analyze_unit, "word|char");
    analyze->add_option("--alpha", analyze_alpha, "KL smoothing (default 0.5)");
    analyze->add_option("--format", analyze_format, "ppl format: messages|chosen|rejected");

    // eval
    auto* eval = app.add_subcommand("eval", "Run a benchmark evaluation");
    EvalCliArgs eval_args;
    eval->add_option("--task", eval_args.task, "arc_challenge|bbq_lite_json|truthfulqa_mc2")
        ->required();
    eval->add_option("--task-path", eval_args.task_path, "Task distribution file or directory")
        ->required();
    eval->add_option("--mode", eval_args.mode, "loglikelihood_mc|generate_until");
    eval->add_option("--system-prompt", eval_args.system_prompt_id,
                     "baseline|ai_principles_v1|ai_principles_v2|<custom id>");
    eval->add_option("--system-prompt-file", eval_args.system_prompt_file,
                     "Prompt text for custom ids (e.g. a RAG tool prompt)");
    eval->add_option("--limit", eval_args.limit, "Evaluate only the first N items");
    eval->add_option("--baseline-report", eval_args.baseline_report,
                     "Earlier report JSON for relative-improvement columns");
    eval->add_option("--stop", eval_args.stop, "generate_until stop string");
    eval->add_option("--max-tokens", eval_args.max_tokens, "generate_until token budget");

    // export-train
    auto* export_train = app.add_subcommand("export-train", "Emit training recipe + dataset");
    std::string export_stage;
    std::string export_dataset_path;
    std::string export_base_model = "meta-llama/Meta-Llama-3-8B";
    export_train->add_option("stage", export_stage, "sft|orpo")->required();
    export_train->add_option("--dataset", export_dataset_path, "Dataset JSONL")->required();
    export_train->add_option("--base-model", export_base_model, "Base model id for the recipe");

    // report
    auto* report_cmd = app.add_subcommand("report", "Print/compare eval reports");
    std::string report_path;
    std::string report_baseline;
    report_cmd->add_option("--report", report_path, "Eval report JSON")->required();
    report_cmd->add_option("--baseline-report", report_baseline, "Baseline report JSON");

    // render-template
    auto* render = app.add_subcommand("render-template", "Debug chat-template rendering");
    std::string render_messages;
    render->add_option("--messages-file", render_messages, "JSON array of {role, content}")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (!config_file.empty()) {
        RunConfig from_file;
        apply_config_file(from_file, config_file);
        // Flags win: reparse onto the file-derived defaults.
        config.endpoint.base_url = app.count("--endpoint-url") ? config.endpoint.base_url
                                                               : from_file.endpoint.base_url;
        config.endpoint.model_id =
            app.count("--model") ? config.endpoint.model_id : from_file.endpoint.model_id;
        config.endpoint.api_key_ref = from_file.endpoint.api_key_ref;
        config.endpoint.timeout_seconds = from_file.endpoint.timeout_seconds;
        config.endpoint.max_parallel = from_file.endpoint.max_parallel;
        config.endpoint.max_retries = from_file.endpoint.max_retries;
        config.endpoint.backoff_base_ms = from_file.endpoint.backoff_base_ms;
        if (!app.count("--seed")) config.seed = from_file.seed;
        if (!app.count("--temperature")) config.temperature = from_file.temperature;
        if (!app.count("--output-dir") && !from_file.output_dir.empty()) {
            config.output_dir = from_file.output_dir;
        }
        if (!app.count("--principles")) config.principles_path = from_file.principles_path;
        if (!app.count("--exemplars")) config.exemplars_path = from_file.exemplars_path;
        if (config.corpus_path.empty()) config.corpus_path = from_file.corpus_path;
        if (mock_fixtures.empty() && from_file.mock_fixtures) {
            mock_fixtures = *from_file.mock_fixtures;
        }
        if (mock_logprobs.empty() && from_file.mock_logprobs) {
            mock_logprobs = *from_file.mock_logprobs;
        }
    }
    if (!mock_fixtures.empty()) config.mock_fixtures = mock_fixtures;
    if (!mock_logprobs.empty()) config.mock_logprobs = mock_logprobs;

    try {
        if (*ingest) return cmd_ingest(config, ingest_format);
        if (*forge) return cmd_forge(config, forge_stage, forge_input);
        if (*sample) return cmd_sample_control(config, sample_input, sample_n);
        if (*analyze) {
            auto unit = metrics::token_unit_from_string(analyze_unit);
            if (!unit.ok()) fail(unit.error());
            if (analyze_metric == "entropy") {
                if (analyze_inputs.empty()) {
                    fail(make_error(ErrorKind::usage, "analyze entropy needs --input"));
                }
                return cmd_analyze_entropy(config, analyze_inputs, unit.value());
            }
            if (analyze_metric == "mi") {
                if (analyze_corpus.empty() || analyze_dataset.empty()) {
                    fail(make_error(ErrorKind::usage,
                                    "analyze mi needs --corpus and --dataset"));
                }
                return cmd_analyze_mi(config, analyze_corpus, analyze_dataset, unit.value());
            }
            if (analyze_metric == "kl") {
                if (analyze_corpus.empty() || analyze_dataset.empty()) {
                    fail(make_error(ErrorKind::usage,
                                    "analyze kl needs --input-p and --input-q"));
                }
                return cmd_analyze_kl(config, analyze_corpus, analyze_dataset, unit.value(),
                                      analyze_alpha);
            }
            if (analyze_metric == "ppl") {
                if (analyze_dataset.empty()) {
                    fail(make_error(ErrorKind::usage, "analyze ppl needs --dataset"));
                }
                return cmd_analyze_ppl(config, analyze_dataset, analyze_format);
            }
            fail(make_error(ErrorKind::usage, "unknown metric: " + analyze_metric));
        }
        if (*eval) return cmd_eval(config, eval_args);
        if (*export_train) {
            return cmd_export_train(config, export_stage, export_dataset_path,
                                    export_base_model);
        }
        if (*report_cmd) return cmd_report(config, report_path, report_baseline);
        if (*render) return cmd_render_template(render_messages);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
