#include "alignforge/distill.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <regex>

#include "alignforge/assets.hpp"
#include "alignforge/hash.hpp"
#include "alignforge/jsonl.hpp"
#include "alignforge/log.hpp"
#include "alignforge/text.hpp"
#include "alignforge/version.hpp"

namespace alignforge::distill {

using nlohmann::json;

std::string PrinciplesDoc::rendered() const {
    std::string out;
    for (size_t i = 0; i < principles.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += principles[i].name;
        out += '\n';
        out += principles[i].definition;
    }
    return out;
}

namespace {

Result<PrinciplesDoc> principles_from_json(const json& parsed, const std::string& where) {
    if (!parsed.is_array() || parsed.empty()) {
        return make_error(ErrorKind::parse, where + ": principles must be a non-empty JSON list");
    }
    PrinciplesDoc doc;
    for (const auto& node : parsed) {
        if (!node.is_object() || !node.contains("name") || !node.contains("definition")) {
            return make_error(ErrorKind::parse,
                              where + ": each principle needs \"name\" and \"definition\"");
        }
        doc.principles.push_back(
            Principle{node["name"].get<std::string>(), node["definition"].get<std::string>()});
    }
    return doc;
}

Result<ExemplarPair> exemplars_from_json(const json& parsed, const std::string& where) {
    if (!parsed.is_object()) {
        return make_error(ErrorKind::parse, where + ": exemplars must be a JSON object");
    }
    ExemplarPair ex;
    struct Field {
        const char* key;
        std::string* dst;
    };
    for (const Field& field : {Field{"q1", &ex.q1}, Field{"a1", &ex.a1}, Field{"q2", &ex.q2},
                               Field{"a2", &ex.a2}}) {
        if (!parsed.contains(field.key) || !parsed[field.key].is_string() ||
            parsed[field.key].get<std::string>().empty()) {
            return make_error(ErrorKind::parse, where + ": missing or empty field \"" +
                                                    field.key + "\"");
        }
        *field.dst = parsed[field.key].get<std::string>();
    }
    return ex;
}

Result<json> parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return make_error(ErrorKind::data, "cannot open file: " + path);
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) return make_error(ErrorKind::parse, "malformed JSON: " + path);
    return parsed;
}

std::string replace_all(std::string text, std::string_view needle, std::string_view replacement) {
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), replacement);
        pos += replacement.size();
    }
    return text;
}

}  // namespace

Result<PrinciplesDoc> load_principles(const std::string& path) {
    auto parsed = parse_json_file(path);
    if (!parsed.ok()) return parsed.error();
    return principles_from_json(parsed.value(), path);
}

PrinciplesDoc bundled_principles() {
    auto parsed = json::parse(assets::principles_json());
    auto doc = principles_from_json(parsed, "bundled principles");
    return doc.value();
}

Result<ExemplarPair> load_exemplars(const std::string& path) {
    auto parsed = parse_json_file(path);
    if (!parsed.ok()) return parsed.error();
    return exemplars_from_json(parsed.value(), path);
}

ExemplarPair bundled_placeholder_exemplars() {
    auto parsed = json::parse(assets::placeholder_exemplars_json());
    return exemplars_from_json(parsed, "bundled exemplars").value();
}

Result<void> validate_sft_sample(const SftSample& sample) {
    size_t i = 0;
    if (i < sample.messages.size() && sample.messages[i].role == llm::Role::system) ++i;
    if (sample.messages.size() != i + 2 || sample.messages[i].role != llm::Role::user ||
        sample.messages[i + 1].role != llm::Role::assistant) {
        return make_error(ErrorKind::data,
                          "sft sample must be [system?], user, assistant messages");
    }
    for (const auto& msg : sample.messages) {
        if (msg.content.empty()) {
            return make_error(ErrorKind::data, "sft sample has an empty message");
        }
    }
    return {};
}

Result<void> validate_po_sample(const PoSample& sample) {
    auto user_content = [](const std::vector<llm::ChatMessage>& messages)
        -> Result<std::string> {
        if (messages.size() != 2 || messages[0].role != llm::Role::user ||
            messages[1].role != llm::Role::assistant || messages[0].content.empty() ||
            messages[1].content.empty()) {
            return make_error(ErrorKind::data, "po branch must be [user, assistant] non-empty");
        }
        return messages[0].content;
    };
    auto chosen_user = user_content(sample.chosen);
    if (!chosen_user.ok()) return chosen_user.error();
    auto rejected_user = user_content(sample.rejected);
    if (!rejected_user.ok()) return rejected_user.error();
    if (chosen_user.value() != rejected_user.value() || chosen_user.value() != sample.prompt) {
        return make_error(ErrorKind::data, "chosen/rejected prompts must equal the sample prompt");
    }
    if (sample.chosen.back().content == sample.rejected.back().content) {
        return make_error(ErrorKind::data, "chosen and rejected answers must differ");
    }
    return {};
}

Result<std::string> render_sft_prompt(const corpus::Document& doc) {
    if (doc.body.empty()) {
        return make_error(ErrorKind::data, "document body is empty: " + doc.id);
    }
    return replace_all(std::string(assets::sft_template()), "{context}", doc.body);
}

std::string render_po_prompt(const QAPair& qa, const ExemplarPair& ex,
                             const PrinciplesDoc& principles, Polarity polarity) {
    std::string out{polarity == Polarity::chosen ? assets::po_chosen_template()
                                                 : assets::po_rejected_template()};
    const std::string context = "Question: " + qa.question + "\nAnswer: " + qa.answer;
    out = replace_all(std::move(out), "{q1}", ex.q1);
    out = replace_all(std::move(out), "{a1}", ex.a1);
    out = replace_all(std::move(out), "{q2}", ex.q2);
    out = replace_all(std::move(out), "{a2}", ex.a2);
    out = replace_all(std::move(out), "{context}", context);
    out = replace_all(std::move(out), "{abc_ai_principles}", principles.rendered());
    return out;
}

Result<ParsedQa> parse_qa_response(const std::string& text) {
    if (text.empty()) {
        return make_error(ErrorKind::parse, "empty generation");
    }
    auto trim = [](std::string s) {
        size_t begin = s.find_first_not_of(" \t\r\n");
        size_t end = s.find_last_not_of(" \t\r\n");
        if (begin == std::string::npos) return std::string{};
        return s.substr(begin, end - begin + 1);
    };
    auto strip_dangling_bold = [&trim](std::string s) {
        s = trim(std::move(s));
        while (s.size() >= 2 && (s.ends_with("**") || s.ends_with("__"))) {
            s = trim(s.substr(0, s.size() - 2));
        }
        while (s.size() >= 2 && (s.starts_with("**") || s.starts_with("__"))) {
            s = trim(s.substr(2));
        }
        return s;
    };

    // Rule 1: labelled "Question:" / "Answer:" segments, optional markdown bold.
    static const std::regex q_label(
        R"((?:\*\*|__)?\s*question\s*(?::\s*(?:\*\*|__)?|(?:\*\*|__)\s*:))",
        std::regex::icase);
    static const std::regex a_label(
        R"((?:\*\*|__)?\s*answer\s*(?::\s*(?:\*\*|__)?|(?:\*\*|__)\s*:))",
        std::regex::icase);
    std::smatch q_match;
    std::smatch a_match;
    if (std::regex_search(text, q_match, q_label)) {
        std::string after_q = q_match.suffix().str();
        if (std::regex_search(after_q, a_match, a_label)) {
            ParsedQa parsed;
            parsed.question = strip_dangling_bold(a_match.prefix().str());
            parsed.answer = strip_dangling_bold(a_match.suffix().str());
            parsed.rule = "labelled_segments";
            if (!parsed.question.empty() && !parsed.answer.empty()) return parsed;
        }
    }

    // Rule 2: first interrogative sentence is the question, remainder the answer.
    size_t mark = text.find('?');
    if (mark != std::string::npos) {
        ParsedQa parsed;
        parsed.question = trim(text.substr(0, mark + 1));
        parsed.answer = trim(text.substr(mark + 1));
        parsed.rule = "first_interrogative";
        if (!parsed.question.empty() && !parsed.answer.empty()) return parsed;
    }

    return make_error(ErrorKind::parse, "no question/answer structure found in generation");
}

namespace {

std::string skip_reason_for(const Error& error) {
    switch (error.kind) {
        case ErrorKind::refusal: return "refusal";
        case ErrorKind::parse: return "parse";
        case ErrorKind::transport: return "transport";
        default: return "error";
    }
}

json message_to_json(const llm::ChatMessage& msg) {
    return json{{"role", llm::to_string(msg.role)}, {"content", msg.content}};
}

json messages_to_json(const std::vector<llm::ChatMessage>& messages) {
    json out = json::array();
    for (const auto& msg : messages) out.push_back(message_to_json(msg));
    return out;
}

Result<std::vector<llm::ChatMessage>> messages_from_json(const json& node,
                                                         const std::string& where) {
    if (!node.is_array()) {
        return make_error(ErrorKind::parse, where + ": messages must be an array");
    }
    std::vector<llm::ChatMessage> out;
    for (const auto& item : node) {
        auto role = llm::role_from_string(item.value("role", ""));
        if (!role.ok()) return make_error(ErrorKind::parse, where + ": " + role.error().message);
        out.push_back(llm::ChatMessage{role.value(), item.value("content", "")});
    }
    return out;
}

json meta_to_json(const std::string& source_doc_id, const GenMeta& meta) {
    return json{{"source_doc_id", source_doc_id},
                {"model_id", meta.model_id},
                {"temperature", meta.temperature},
                {"timestamp", meta.timestamp},
                {"prompt_digest", meta.prompt_digest}};
}

void meta_from_json(const json& node, std::string& source_doc_id, GenMeta& meta) {
    source_doc_id = node.value("source_doc_id", "");
    meta.model_id = node.value("model_id", "");
    meta.temperature = node.value("temperature", 0.0);
    meta.timestamp = node.value("timestamp", "");
    meta.prompt_digest = node.value("prompt_digest", "");
}

json manifest_to_json(const DatasetManifest& manifest) {
    json reasons = json::object();
    for (const auto& [reason, count] : manifest.skip_reasons) reasons[reason] = count;
    return json{{"kind", manifest.kind},
                {"sample_count", manifest.sample_count},
                {"requested_count", manifest.requested_count},
                {"skip_count", manifest.skip_count},
                {"skip_reasons", reasons},
                {"source_checksum", manifest.source_checksum},
                {"prompts_digest", manifest.prompts_digest},
                {"model_id", manifest.model_id},
                {"seed", manifest.seed},
                {"temperature", manifest.temperature},
                {"generated_at", manifest.generated_at},
                {"tool_version", manifest.tool_version}};
}

DatasetManifest manifest_from_json(const json& node) {
    DatasetManifest manifest;
    manifest.kind = node.value("kind", "");
    manifest.sample_count = node.value("sample_count", size_t{0});
    manifest.requested_count = node.value("requested_count", size_t{0});
    manifest.skip_count = node.value("skip_count", size_t{0});
    if (node.contains("skip_reasons")) {
        for (const auto& [reason, count] : node["skip_reasons"].items()) {
            manifest.skip_reasons[reason] = count.get<size_t>();
        }
    }
    manifest.source_checksum = node.value("source_checksum", "");
    manifest.prompts_digest = node.value("prompts_digest", "");
    manifest.model_id = node.value("model_id", "");
    manifest.seed = node.value("seed", int64_t{0});
    manifest.temperature = node.value("temperature", 0.0);
    manifest.generated_at = node.value("generated_at", "");
    manifest.tool_version = node.value("tool_version", "");
    return manifest;
}

std::vector<json> dataset_lines(const Dataset& dataset) {
    std::vector<json> lines;
    if (dataset.kind == DatasetKind::sft) {
        for (const auto& sample : dataset.sft) {
            lines.push_back(json{{"messages", messages_to_json(sample.messages)},
                                 {"meta", meta_to_json(sample.source_doc_id, sample.gen_meta)}});
        }
    } else {
        for (const auto& sample : dataset.po) {
            lines.push_back(json{{"prompt", sample.prompt},
                                 {"chosen", messages_to_json(sample.chosen)},
                                 {"rejected", messages_to_json(sample.rejected)},
                                 {"meta", meta_to_json(sample.source_doc_id, sample.gen_meta)}});
        }
    }
    return lines;
}

}  // namespace

std::string manifest_sidecar_path(const std::string& dataset_path) {
    return dataset_path + ".manifest.json";
}

Result<void> save_dataset(const Dataset& dataset, const std::string& path) {
    auto written = jsonl::write_file(path, dataset_lines(dataset));
    if (!written.ok()) return written;

    std::ofstream manifest_out(manifest_sidecar_path(path), std::ios::binary | std::ios::trunc);
    if (!manifest_out) {
        return make_error(ErrorKind::data, "cannot write manifest for " + path);
    }
    manifest_out << manifest_to_json(dataset.manifest).dump(2) << '\n';
    return {};
}

Result<Dataset> load_dataset(const std::string& path) {
    auto records = jsonl::read_file(path);
    if (!records.ok()) return records.error();
    if (records.value().empty()) {
        return make_error(ErrorKind::data, "dataset is empty: " + path);
    }

    Dataset dataset;
    const bool is_po = records.value().front().value.contains("chosen");
    dataset.kind = is_po ? DatasetKind::po : DatasetKind::sft;
    for (const auto& record : records.value()) {
        const std::string where = path + ":" + std::to_string(record.line_number);
        const json& value = record.value;
        if (is_po) {
            PoSample sample;
            sample.prompt = value.value("prompt", "");
            auto chosen = messages_from_json(value.value("chosen", json::array()), where);
            if (!chosen.ok()) return chosen.error();
            auto rejected = messages_from_json(value.value("rejected", json::array()), where);
            if (!rejected.ok()) return rejected.error();
            sample.chosen = chosen.take();
            sample.rejected = rejected.take();
            if (value.contains("meta")) {
                meta_from_json(value["meta"], sample.source_doc_id, sample.gen_meta);
            }
            dataset.po.push_back(std::move(sample));
        } else {
            if (!value.contains("messages")) {
                return make_error(ErrorKind::parse, where + ": record has no messages");
            }
            SftSample sample;
            auto messages = messages_from_json(value["messages"], where);
            if (!messages.ok()) return messages.error();
            sample.messages = messages.take();
            if (value.contains("meta")) {
                meta_from_json(value["meta"], sample.source_doc_id, sample.gen_meta);
            }
            dataset.sft.push_back(std::move(sample));
        }
    }

    std::ifstream manifest_in(manifest_sidecar_path(path));
    if (manifest_in) {
        json manifest = json::parse(manifest_in, nullptr, false);
        if (!manifest.is_discarded()) dataset.manifest = manifest_from_json(manifest);
    } else {
        dataset.manifest.kind = is_po ? "po" : "sft";
        dataset.manifest.sample_count = dataset.size();
    }
    return dataset;
}

std::string dataset_content_checksum(const Dataset& dataset) {
    std::string joined;
    for (const auto& line : dataset_lines(dataset)) {
        joined += jsonl::to_line(line);
        joined += '\n';
    }
    return sha256_hex(joined);
}

Result<Dataset> generate_sft_dataset(const corpus::CorpusStore& corpus, llm::Client& client,
                                     const GenerateOptions& options) {
    if (corpus.documents.empty()) {
        return make_error(ErrorKind::data, "corpus is empty");
    }

    std::vector<llm::ChatRequest> requests;
    requests.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        auto prompt = render_sft_prompt(doc);
        if (!prompt.ok()) return prompt.error();
        llm::ChatRequest req;
        req.messages.push_back(llm::ChatMessage{llm::Role::user, prompt.take()});
        req.temperature = options.temperature;
        req.max_tokens = options.max_tokens;
        req.seed = options.seed;
        requests.push_back(std::move(req));
    }

    auto results = client.chat_batch(requests);

    Dataset dataset;
    dataset.kind = DatasetKind::sft;
    DatasetManifest& manifest = dataset.manifest;
    manifest.kind = "sft";
    manifest.requested_count = corpus.documents.size();
    manifest.source_checksum = corpus.corpus_checksum();
    manifest.prompts_digest = assets::prompts_digest();
    manifest.model_id = client.config().model_id;
    manifest.seed = options.seed;
    manifest.temperature = options.temperature;
    manifest.tool_version = kVersion;

    auto record_skip = [&manifest](const std::string& doc_id, const std::string& reason) {
        ++manifest.skip_count;
        ++manifest.skip_reasons[reason];
        log::warn("skipping document " + doc_id + ": " + reason);
    };

    for (size_t i = 0; i < corpus.documents.size(); ++i) {
        const corpus::Document& doc = corpus.documents[i];
        if (!results[i].ok()) {
            record_skip(doc.id, skip_reason_for(results[i].error()));
            continue;
        }
        const llm::ChatResponse& resp = results[i].value();
        auto parsed = parse_qa_response(resp.text);
        if (!parsed.ok()) {
            record_skip(doc.id, "parse");
            continue;
        }
        // Cheap proxy for "must not refer to the original article".
        if (!doc.title.empty() && (text::contains_ci(parsed.value().question, doc.title) ||
                                   text::contains_ci(parsed.value().answer, doc.title))) {
            record_skip(doc.id, "title_leak");
            continue;
        }
        SftSample sample;
        sample.messages.push_back(llm::ChatMessage{llm::Role::user, parsed.value().question});
        sample.messages.push_back(llm::ChatMessage{llm::Role::assistant, parsed.value().answer});
        sample.source_doc_id = doc.id;
        sample.gen_meta = GenMeta{manifest.model_id, options.temperature, resp.created_at,
                                  sha256_hex(requests[i].messages[0].content)};
        if (auto valid = validate_sft_sample(sample); !valid.ok()) {
            record_skip(doc.id, "invalid_shape");
            continue;
        }
        if (manifest.generated_at.empty()) manifest.generated_at = resp.created_at;
        dataset.sft.push_back(std::move(sample));
    }

    manifest.sample_count = dataset.sft.size();
    if (manifest.skip_count * 2 > manifest.requested_count) {
        return make_error(ErrorKind::data,
                          "aborting: " + std::to_string(manifest.skip_count) + " of " +
                              std::to_string(manifest.requested_count) +
                              " generations failed (over 50%); check prompts and endpoint");
    }
    return dataset;
}

Result<Dataset> generate_po_dataset(const Dataset& sft, const ExemplarPair& ex,
                                    const PrinciplesDoc& principles, llm::Client& client,
                                    const GenerateOptions& options) {
    if (sft.kind != DatasetKind::sft) {
        return make_error(ErrorKind::data, "po generation needs a messages-format dataset");
    }
    if (sft.sft.empty()) {
        return make_error(ErrorKind::data, "sft dataset is empty");
    }

    std::vector<QAPair> pairs;
    pairs.reserve(sft.sft.size());
    for (const auto& sample : sft.sft) {
        if (auto valid = validate_sft_sample(sample); !valid.ok()) return valid.error();
        QAPair qa;
        qa.question = sample.messages[sample.messages.size() - 2].content;
        qa.answer = sample.messages.back().content;
        qa.source_doc_id = sample.source_doc_id;
        pairs.push_back(std::move(qa));
    }

    // Two calls per sample: chosen rewrite then rejected rewrite.
    std::vector<llm::ChatRequest> requests;
    requests.reserve(pairs.size() * 2);
    for (const auto& qa : pairs) {
        for (Polarity polarity : {Polarity::chosen, Polarity::rejected}) {
            llm::ChatRequest req;
            req.messages.push_back(llm::ChatMessage{
                llm::Role::user, render_po_prompt(qa, ex, principles, polarity)});
            req.temperature = options.temperature;
            req.max_tokens = options.max_tokens;
            req.seed = options.seed;
            requests.push_back(std::move(req));
        }
    }
    auto results = client.chat_batch(requests);

    Dataset dataset;
    dataset.kind = DatasetKind::po;
    DatasetManifest& manifest = dataset.manifest;
    manifest.kind = "po";
    manifest.requested_count = pairs.size();
    manifest.source_checksum = dataset_content_checksum(sft);
    manifest.prompts_digest = assets::prompts_digest();
    manifest.model_id = client.config().model_id;
    manifest.seed = options.seed;
    manifest.temperature = options.temperature;
    manifest.tool_version = kVersion;

    auto record_skip = [&manifest](const std::string& doc_id, const std::string& reason) {
        ++manifest.skip_count;
        ++manifest.skip_reasons[reason];
        log::warn("skipping po sample from " + doc_id + ": " + reason);
    };

    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& chosen_result = results[2 * i];
        const auto& rejected_result = results[2 * i + 1];
        if (!chosen_result.ok()) {
            record_skip(pairs[i].source_doc_id, skip_reason_for(chosen_result.error()));
            continue;
        }
        if (!rejected_result.ok()) {
            record_skip(pairs[i].source_doc_id, skip_reason_for(rejected_result.error()));
            continue;
        }
        const std::string& chosen_text = chosen_result.value().text;
        const std::string& rejected_text = rejected_result.value().text;
        if (chosen_text == rejected_text) {
            record_skip(pairs[i].source_doc_id, "degenerate_pair");
            continue;
        }
        PoSample sample;
        sample.prompt = pairs[i].question;
        sample.chosen = {llm::ChatMessage{llm::Role::user, pairs[i].question},
                         llm::ChatMessage{llm::Role::assistant, chosen_text}};
        sample.rejected = {llm::ChatMessage{llm::Role::user, pairs[i].question},
                           llm::ChatMessage{llm::Role::assistant, rejected_text}};
        sample.source_doc_id = pairs[i].source_doc_id;
        sample.gen_meta = GenMeta{manifest.model_id, options.temperature,
                                  chosen_result.value().created_at,
                                  sha256_hex(requests[2 * i].messages[0].content)};
        if (auto valid = validate_po_sample(sample); !valid.ok()) {
            record_skip(pairs[i].source_doc_id, "invalid_shape");
            continue;
        }
        if (manifest.generated_at.empty()) {
            manifest.generated_at = chosen_result.value().created_at;
        }
        dataset.po.push_back(std::move(sample));
    }

    manifest.sample_count = dataset.po.size();
    if (manifest.skip_count * 2 > manifest.requested_count) {
        return make_error(ErrorKind::data,
                          "aborting: " + std::to_string(manifest.skip_count) + " of " +
                              std::to_string(manifest.requested_count) +
                              " rewrites failed (over 50%); check prompts and endpoint");
    }
    return dataset;
}

namespace {

// Rejection sampling with a power-of-two mask; unbiased and identical on
// every platform (mt19937_64 is fully specified, the std distributions are
// not).
uint64_t bounded_uniform(std::mt19937_64& rng, uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        uint64_t v = rng() & mask;
        if (v < bound) return v;
    }
}

}  // namespace

Result<Dataset> sample_control_dataset(const Dataset& dataset, size_t n, uint64_t seed) {
    const size_t total = dataset.size();
    if (n > total) {
        return make_error(ErrorKind::data, "cannot sample " + std::to_string(n) + " from " +
                                               std::to_string(total) + " samples");
    }
    std::vector<size_t> indices(total);
    for (size_t i = 0; i < total; ++i) indices[i] = i;

    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + static_cast<size_t>(bounded_uniform(rng, total - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(n);
    std::sort(indices.begin(), indices.end());

    Dataset out;
    out.kind = dataset.kind;
    for (size_t index : indices) {
        if (dataset.kind == DatasetKind::sft) {
            out.sft.push_back(dataset.sft[index]);
        } else {
            out.po.push_back(dataset.po[index]);
        }
    }
    out.manifest.kind = dataset.manifest.kind.empty()
                            ? (dataset.kind == DatasetKind::sft ? "sft" : "po")
                            : dataset.manifest.kind;
    out.manifest.sample_count = n;
    out.manifest.requested_count = n;
    out.manifest.seed = static_cast<int64_t>(seed);
    out.manifest.source_checksum = dataset_content_checksum(dataset);
    out.manifest.prompts_digest = dataset.manifest.prompts_digest;
    out.manifest.model_id = dataset.manifest.model_id;
    out.manifest.temperature = dataset.manifest.temperature;
    out.manifest.generated_at = dataset.manifest.generated_at;
    out.manifest.tool_version = kVersion;
    return out;
}

}  // namespace alignforge::distill
