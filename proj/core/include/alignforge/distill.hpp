#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alignforge/corpus.hpp"
#include "alignforge/error.hpp"
#include "alignforge/llm_client.hpp"

namespace alignforge::distill {

struct Principle {
    std::string name;
    std::string definition;
};

// The organisational principles conditioning preference rewrites and
// in-context alignment prompts.
struct PrinciplesDoc {
    std::vector<Principle> principles;

    // Canonical flat rendering: "name\ndefinition" blocks joined by blank
    // lines. Deterministic given the list.
    std::string rendered() const;
};

// Principles file: JSON list of {"name", "definition"}.
Result<PrinciplesDoc> load_principles(const std::string& path);
// The seven bundled principles.
PrinciplesDoc bundled_principles();

// Two human-reviewed question/answer pairs used as canonical examples in
// rewrite prompts.
struct ExemplarPair {
    std::string q1, a1, q2, a2;
};

// Exemplars file: JSON {"q1","a1","q2","a2"}.
Result<ExemplarPair> load_exemplars(const std::string& path);
// Bundled synthetic placeholder pair, for smoke tests only.
ExemplarPair bundled_placeholder_exemplars();

struct GenMeta {
    std::string model_id;
    double temperature = 0.0;
    std::string timestamp;  // backend-reported creation time
    std::string prompt_digest;
};

struct QAPair {
    std::string question;
    std::string answer;
    std::string source_doc_id;
    GenMeta gen_meta;
};

struct SftSample {
    std::vector<llm::ChatMessage> messages;
    std::string source_doc_id;
    GenMeta gen_meta;
};

struct PoSample {
    std::string prompt;
    std::vector<llm::ChatMessage> chosen;
    std::vector<llm::ChatMessage> rejected;
    std::string source_doc_id;
    GenMeta gen_meta;
};

// Optional single leading system message, then exactly one user and one
// assistant message, all non-empty.
Result<void> validate_sft_sample(const SftSample& sample);
// Chosen/rejected share the prompt and user content; final assistant
// contents differ.
Result<void> validate_po_sample(const PoSample& sample);

enum class DatasetKind { sft, po };

struct DatasetManifest {
    std::string kind;  // "sft" | "po"
    size_t sample_count = 0;
    size_t requested_count = 0;
    size_t skip_count = 0;
    std::map<std::string, size_t> skip_reasons;
    std::string source_checksum;  // corpus (sft) or source dataset (po/control)
    std::string prompts_digest;
    std::string model_id;
    int64_t seed = 0;
    double temperature = 0.0;
    std::string generated_at;  // backend-reported; fixed epoch under the mock
    std::string tool_version;
};

struct Dataset {
    DatasetKind kind = DatasetKind::sft;
    std::vector<SftSample> sft;
    std::vector<PoSample> po;
    DatasetManifest manifest;

    size_t size() const { return kind == DatasetKind::sft ? sft.size() : po.size(); }
};

// SFT dataset JSONL: {"messages": [{"role","content"},...], "meta": {...}}
// PO dataset JSONL:  {"prompt", "chosen": [messages], "rejected": [messages], "meta": {...}}
// Manifest is written as a JSON sidecar at <path>.manifest.json.
Result<void> save_dataset(const Dataset& dataset, const std::string& path);
Result<Dataset> load_dataset(const std::string& path);
std::string manifest_sidecar_path(const std::string& dataset_path);

// sha256 over the serialized JSONL lines; the dataset's content identity.
std::string dataset_content_checksum(const Dataset& dataset);

enum class Polarity { chosen, rejected };

// The generation prompt with {context} replaced by the article body.
Result<std::string> render_sft_prompt(const corpus::Document& doc);

// The rewrite prompt: exemplars, the Q&A pair under review as {context}
// ("Question: ...\nAnswer: ..."), the rendered principles, and the
// polarity-specific rewrite clause.
std::string render_po_prompt(const QAPair& qa, const ExemplarPair& ex,
                             const PrinciplesDoc& principles, Polarity polarity);

struct ParsedQa {
    std::string question;
    std::string answer;
    std::string rule;  // which extraction rule fired
};

// Extracts (question, answer) from a generation: labelled "Question:" /
// "Answer:" segments first, else first interrogative sentence.
Result<ParsedQa> parse_qa_response(const std::string& text);

struct GenerateOptions {
    double temperature = 0.7;
    int64_t seed = 0;
    int max_tokens = 1024;
};

Result<Dataset> generate_sft_dataset(const corpus::CorpusStore& corpus, llm::Client& client,
                                     const GenerateOptions& options);

Result<Dataset> generate_po_dataset(const Dataset& sft, const ExemplarPair& ex,
                                    const PrinciplesDoc& principles, llm::Client& client,
                                    const GenerateOptions& options);

// Uniform sample of n without replacement, pinned PRNG (mt19937_64 with
// masked rejection sampling), output in the sorted order of the selected
// original indices.
Result<Dataset> sample_control_dataset(const Dataset& dataset, size_t n, uint64_t seed);

}  // namespace alignforge::distill
