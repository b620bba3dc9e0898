#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alignforge/corpus.hpp"
#include "alignforge/text.hpp"
#include "support/test_util.hpp"

using namespace alignforge;
using af_test::TempDir;

TEST_CASE("normalize_text collapses whitespace and preserves paragraph breaks") {
    CHECK(text::normalize_text("a  b") == "a b");
    CHECK(text::normalize_text("a\r\nb") == "a\nb");
    CHECK(text::normalize_text("") == "");
    CHECK(text::normalize_text("a\n\n\n\nb") == "a\n\nb");
    CHECK(text::normalize_text("  lead and trail \t ") == "lead and trail");
    CHECK(text::normalize_text("a \n b") == "a\nb");
    CHECK(text::normalize_text("tab\tseparated") == "tab separated");
}

TEST_CASE("normalize_text applies canonical composition") {
    // e + combining acute composes to the precomposed character.
    std::string decomposed = "caf\x65\xcc\x81";  // "cafe" + U+0301
    std::string composed = "caf\xc3\xa9";        // "café"
    CHECK(text::normalize_text(decomposed) == composed);
}

TEST_CASE("normalize_text is idempotent on randomized inputs") {
    std::mt19937_64 rng(1234);
    const std::string alphabet = "ab c\t\r\n\n.é漢";
    for (int trial = 0; trial < 200; ++trial) {
        std::string raw;
        size_t length = rng() % 60;
        for (size_t i = 0; i < length; ++i) {
            raw += alphabet[rng() % alphabet.size()];
        }
        std::string once = text::normalize_text(raw);
        CHECK(text::normalize_text(once) == once);
    }
}

TEST_CASE("tokenizers") {
    CHECK(text::tokenize_words("The cat, the 'cat'.") ==
          std::vector<std::string>{"the", "cat", "the", "cat"});
    CHECK(text::tokenize_chars("ab") == std::vector<std::string>{"a", "b"});
    CHECK(text::tokenize_chars("é!") == std::vector<std::string>{"é", "!"});
    CHECK(text::tokenize_whitespace(" a  bb\tc\n") == std::vector<std::string>{"a", "bb", "c"});
}

namespace {

std::string jsonl_record(const std::string& id, const std::string& body) {
    return "{\"id\": \"" + id + "\", \"title\": \"T " + id + "\", \"body\": \"" + body +
           "\", \"source_uri\": \"local://" + id + "\", \"published_at\": null}"
           "\n";
}

}  // namespace

TEST_CASE("ingest_documents from jsonl") {
    TempDir dir("corpus-ingest");
    const std::string path = dir.file("corpus.jsonl");

    SUBCASE("three distinct records ingest as three documents") {
        af_test::write_file(path, jsonl_record("a", "alpha body") +
                                      jsonl_record("b", "beta body") +
                                      jsonl_record("c", "gamma body"));
        auto store = corpus::ingest_documents(path);
        REQUIRE(store.ok());
        CHECK(store.value().documents.size() == 3);
        CHECK(store.value().input_record_count == 3);
    }

    SUBCASE("identical bodies deduplicate by checksum") {
        af_test::write_file(path, jsonl_record("a", "same body") +
                                      jsonl_record("b", "same body"));
        auto store = corpus::ingest_documents(path);
        REQUIRE(store.ok());
        CHECK(store.value().documents.size() == 1);
        CHECK(store.value().duplicate_count == 1);
        CHECK(store.value().documents[0].id == "a");
    }

    SUBCASE("whitespace-only body differences deduplicate too") {
        af_test::write_file(path, jsonl_record("a", "same  body") +
                                      jsonl_record("b", "same body"));
        auto store = corpus::ingest_documents(path);
        REQUIRE(store.ok());
        CHECK(store.value().documents.size() == 1);
    }

    SUBCASE("empty file is a zero-valid-documents error") {
        af_test::write_file(path, "");
        auto store = corpus::ingest_documents(path);
        REQUIRE_FALSE(store.ok());
        CHECK(store.error().message.find("zero valid documents") != std::string::npos);
    }

    SUBCASE("malformed record reports its line number") {
        af_test::write_file(path, jsonl_record("a", "alpha") + "{not json\n");
        auto store = corpus::ingest_documents(path);
        REQUIRE_FALSE(store.ok());
        CHECK(store.error().message.find(":2") != std::string::npos);
    }

    SUBCASE("empty body after normalization is rejected with line number") {
        af_test::write_file(path, jsonl_record("a", "   "));
        auto store = corpus::ingest_documents(path);
        REQUIRE_FALSE(store.ok());
        CHECK(store.error().message.find(":1") != std::string::npos);
    }

    SUBCASE("missing path") {
        auto store = corpus::ingest_documents(dir.file("nope.jsonl"));
        REQUIRE_FALSE(store.ok());
        CHECK(store.error().kind == ErrorKind::data);
    }

    SUBCASE("documents come out sorted by id") {
        af_test::write_file(path, jsonl_record("z", "zzz") + jsonl_record("a", "aaa") +
                                      jsonl_record("m", "mmm"));
        auto store = corpus::ingest_documents(path);
        REQUIRE(store.ok());
        CHECK(store.value().documents[0].id == "a");
        CHECK(store.value().documents[1].id == "m");
        CHECK(store.value().documents[2].id == "z");
    }

    SUBCASE("duplicate ids are rejected") {
        af_test::write_file(path, jsonl_record("a", "one") + jsonl_record("a", "two"));
        auto store = corpus::ingest_documents(path);
        REQUIRE_FALSE(store.ok());
    }
}

TEST_CASE("ingest of the same path twice yields byte-identical stores") {
    TempDir dir("corpus-repeat");
    const std::string path = dir.file("corpus.jsonl");
    af_test::write_file(path, jsonl_record("a", "alpha  body\\r\\nwith noise") +
                                  jsonl_record("b", "beta body"));
    auto first = corpus::ingest_documents(path);
    auto second = corpus::ingest_documents(path);
    REQUIRE(first.ok());
    REQUIRE(second.ok());

    const std::string out1 = dir.file("out1.jsonl");
    const std::string out2 = dir.file("out2.jsonl");
    REQUIRE(corpus::save_store(first.value(), out1).ok());
    REQUIRE(corpus::save_store(second.value(), out2).ok());
    CHECK(af_test::read_file(out1) == af_test::read_file(out2));
    CHECK(first.value().corpus_checksum() == second.value().corpus_checksum());
}

TEST_CASE("plain-text directory ingest") {
    TempDir dir("corpus-textdir");
    af_test::write_file(dir.file("first-article.txt"),
                        "Ferry timetable changes\nThe ferry now runs hourly.\n");
    af_test::write_file(dir.file("second-article.txt"),
                        "Library news\nThe catalogue doubled.\n");
    auto store = corpus::ingest_documents(dir.path().string());
    REQUIRE(store.ok());
    REQUIRE(store.value().documents.size() == 2);
    CHECK(store.value().documents[0].id == "first-article");
    CHECK(store.value().documents[0].title == "Ferry timetable changes");
    CHECK(store.value().documents[1].id == "second-article");
}

TEST_CASE("store round trip preserves documents") {
    TempDir dir("corpus-roundtrip");
    const std::string path = dir.file("corpus.jsonl");
    af_test::write_file(path, jsonl_record("a", "alpha body") + jsonl_record("b", "beta"));
    auto store = corpus::ingest_documents(path);
    REQUIRE(store.ok());
    const std::string saved = dir.file("saved.jsonl");
    REQUIRE(corpus::save_store(store.value(), saved).ok());
    auto loaded = corpus::load_store(saved);
    REQUIRE(loaded.ok());
    REQUIRE(loaded.value().documents.size() == store.value().documents.size());
    for (size_t i = 0; i < loaded.value().documents.size(); ++i) {
        CHECK(loaded.value().documents[i].id == store.value().documents[i].id);
        CHECK(loaded.value().documents[i].body == store.value().documents[i].body);
        CHECK(loaded.value().documents[i].checksum == store.value().documents[i].checksum);
    }
}
