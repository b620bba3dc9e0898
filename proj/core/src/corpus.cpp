#include "alignforge/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "alignforge/hash.hpp"
#include "alignforge/jsonl.hpp"
#include "alignforge/text.hpp"

namespace alignforge::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Document::compute_checksum(const std::string& normalized_body) {
    return sha256_hex(normalized_body);
}

std::string CorpusStore::corpus_checksum() const {
    std::string joined;
    for (const auto& doc : documents) {
        joined += doc.checksum;
        joined += '\n';
    }
    return sha256_hex(joined);
}

namespace {

Result<Document> document_from_json(const json& record, const std::string& where) {
    if (!record.is_object()) {
        return make_error(ErrorKind::parse, where + ": record is not a JSON object");
    }
    for (const char* field : {"id", "body"}) {
        if (!record.contains(field) || !record[field].is_string()) {
            return make_error(ErrorKind::parse,
                              where + ": missing or non-string field \"" + field + "\"");
        }
    }
    Document doc;
    doc.id = record["id"].get<std::string>();
    doc.title = record.value("title", std::string{});
    doc.body = text::normalize_text(record["body"].get<std::string>());
    doc.source_uri = record.value("source_uri", std::string{});
    if (record.contains("published_at") && record["published_at"].is_string()) {
        doc.published_at = record["published_at"].get<std::string>();
    }
    if (doc.id.empty()) {
        return make_error(ErrorKind::parse, where + ": empty id");
    }
    if (doc.body.empty()) {
        return make_error(ErrorKind::parse, where + ": empty body after normalization");
    }
    doc.checksum = Document::compute_checksum(doc.body);
    return doc;
}

Result<CorpusStore> finalize(std::vector<Document> docs, size_t input_count) {
    if (docs.empty()) {
        return make_error(ErrorKind::data, "zero valid documents");
    }
    // Dedup by normalized-body checksum; first occurrence (in id order) wins.
    std::stable_sort(docs.begin(), docs.end(),
                     [](const Document& a, const Document& b) { return a.id < b.id; });
    for (size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].id == docs[i - 1].id) {
            return make_error(ErrorKind::data, "duplicate document id: " + docs[i].id);
        }
    }
    CorpusStore store;
    store.input_record_count = input_count;
    std::set<std::string> seen;
    for (auto& doc : docs) {
        if (!seen.insert(doc.checksum).second) {
            ++store.duplicate_count;
            continue;
        }
        store.documents.push_back(std::move(doc));
    }
    return store;
}

Result<CorpusStore> ingest_jsonl(const std::string& path) {
    auto records = jsonl::read_file(path);
    if (!records.ok()) return records.error();
    std::vector<Document> docs;
    for (const auto& record : records.value()) {
        auto doc = document_from_json(record.value,
                                      path + ":" + std::to_string(record.line_number));
        if (!doc.ok()) return doc.error();
        docs.push_back(doc.take());
    }
    return finalize(std::move(docs), records.value().size());
}

Result<CorpusStore> ingest_text_dir(const std::string& path) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Document> docs;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) return make_error(ErrorKind::data, "cannot read " + file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string raw = buf.str();

        Document doc;
        doc.id = file.stem().string();
        doc.source_uri = file.string();
        size_t eol = raw.find('\n');
        doc.title = text::normalize_text(eol == std::string::npos ? raw : raw.substr(0, eol));
        doc.body = text::normalize_text(raw);
        if (doc.body.empty()) {
            return make_error(ErrorKind::parse, file.string() + ": empty body after normalization");
        }
        doc.checksum = Document::compute_checksum(doc.body);
        docs.push_back(std::move(doc));
    }
    return finalize(std::move(docs), files.size());
}

}  // namespace

Result<CorpusStore> ingest_documents(const std::string& path, IngestFormat format) {
    std::error_code ec;
    auto status = fs::status(path, ec);
    if (ec || status.type() == fs::file_type::not_found) {
        return make_error(ErrorKind::data, "path does not exist: " + path);
    }
    if (format == IngestFormat::auto_detect) {
        format = fs::is_directory(status) ? IngestFormat::text_dir : IngestFormat::jsonl;
    }
    if (format == IngestFormat::text_dir && !fs::is_directory(status)) {
        return make_error(ErrorKind::usage, "text-dir ingest requires a directory: " + path);
    }
    if (format == IngestFormat::jsonl && fs::is_directory(status)) {
        return make_error(ErrorKind::usage, "jsonl ingest requires a file: " + path);
    }
    return format == IngestFormat::jsonl ? ingest_jsonl(path) : ingest_text_dir(path);
}

Result<void> save_store(const CorpusStore& store, const std::string& path) {
    std::vector<json> lines;
    lines.reserve(store.documents.size());
    for (const auto& doc : store.documents) {
        json record{
            {"id", doc.id},
            {"title", doc.title},
            {"body", doc.body},
            {"source_uri", doc.source_uri},
            {"published_at", doc.published_at ? json(*doc.published_at) : json(nullptr)},
        };
        lines.push_back(std::move(record));
    }
    return jsonl::write_file(path, lines);
}

Result<CorpusStore> load_store(const std::string& path) {
    return ingest_jsonl(path);
}

}  // namespace alignforge::corpus
