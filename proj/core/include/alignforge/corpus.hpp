#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alignforge/error.hpp"

namespace alignforge::corpus {

// One ingested source article; the context input to synthetic generation.
struct Document {
    std::string id;
    std::string title;
    std::string body;  // normalized
    std::string source_uri;
    std::optional<std::string> published_at;  // ISO-8601
    std::string checksum;                     // sha256 of normalized body

    static std::string compute_checksum(const std::string& normalized_body);
};

enum class IngestFormat { auto_detect, jsonl, text_dir };

struct CorpusStore {
    std::vector<Document> documents;  // sorted by id, unique ids
    size_t input_record_count = 0;
    size_t duplicate_count = 0;

    // sha256 over the sorted per-document checksums; identifies the corpus
    // content independent of file layout.
    std::string corpus_checksum() const;
};

// Ingests documents from a JSONL file (one object per line) or a directory
// of .txt files (filename sans extension becomes the id, first line the
// title). Bodies are normalized, records deduplicated by body checksum,
// output sorted by id.
Result<CorpusStore> ingest_documents(const std::string& path,
                                     IngestFormat format = IngestFormat::auto_detect);

// Corpus JSONL persistence:
// {"id": str, "title": str, "body": str, "source_uri": str, "published_at": str|null}
Result<void> save_store(const CorpusStore& store, const std::string& path);
Result<CorpusStore> load_store(const std::string& path);

}  // namespace alignforge::corpus
