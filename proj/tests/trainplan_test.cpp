#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alignforge/trainplan.hpp"
#include "support/test_util.hpp"

using namespace alignforge;
using namespace alignforge::trainplan;
using llm::ChatMessage;
using llm::Role;
using af_test::TempDir;

TEST_CASE("render_chat_template pins the separator layout") {
    auto full = render_chat_template(
        {{Role::system, "S"}, {Role::user, "U"}, {Role::assistant, "A"}});
    REQUIRE(full.ok());
    CHECK(full.value() == "<|system|>\nS</s>\n<|user|>\nU</s>\n<|assistant|>\nA</s>\n");

    auto single = render_chat_template({{Role::user, "U"}});
    REQUIRE(single.ok());
    CHECK(single.value() == "<|user|>\nU</s>\n");
}

TEST_CASE("render_chat_template rejects bad shapes") {
    CHECK_FALSE(render_chat_template({}).ok());
    CHECK_FALSE(render_chat_template({{Role::assistant, "A"}, {Role::user, "U"}}).ok());
    CHECK_FALSE(render_chat_template({{Role::user, "U"}, {Role::system, "S"}}).ok());
    CHECK_FALSE(render_chat_template({{Role::user, "a"}, {Role::user, "b"}}).ok());
}

TEST_CASE("parse-back recovers roles and contents exactly (injectivity property)") {
    std::mt19937_64 rng(4242);
    const std::string alphabet = "abc XYZ\n.!09";
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ChatMessage> messages;
        if (rng() % 2) messages.push_back({Role::system, "sys prompt"});
        size_t turns = 1 + rng() % 4;
        for (size_t t = 0; t < turns; ++t) {
            auto content = [&] {
                std::string s;
                size_t length = 1 + rng() % 24;
                for (size_t i = 0; i < length; ++i) s += alphabet[rng() % alphabet.size()];
                return s;
            };
            messages.push_back({Role::user, content()});
            if (t + 1 < turns || rng() % 2) messages.push_back({Role::assistant, content()});
        }
        auto rendered = render_chat_template(messages);
        REQUIRE(rendered.ok());
        auto parsed = parse_chat_template(rendered.value());
        REQUIRE(parsed.ok());
        CHECK(parsed.value() == messages);
    }
}

namespace {

distill::Dataset fixed_sft_dataset() {
    distill::Dataset dataset;
    dataset.kind = distill::DatasetKind::sft;
    dataset.manifest.kind = "sft";
    distill::SftSample one;
    one.messages = {{Role::user, "What is 2 + 2?"}, {Role::assistant, "4, by counting."}};
    one.source_doc_id = "doc-a";
    distill::SftSample two;
    two.messages = {{Role::user, "Name a prime."}, {Role::assistant, "7 is prime."}};
    two.source_doc_id = "doc-b";
    dataset.sft = {one, two};
    dataset.manifest.sample_count = 2;
    return dataset;
}

distill::Dataset fixed_po_dataset() {
    distill::Dataset dataset;
    dataset.kind = distill::DatasetKind::po;
    dataset.manifest.kind = "po";
    distill::PoSample sample;
    sample.prompt = "What is 2 + 2?";
    sample.chosen = {{Role::user, "What is 2 + 2?"}, {Role::assistant, "4."}};
    sample.rejected = {{Role::user, "What is 2 + 2?"}, {Role::assistant, "5."}};
    sample.source_doc_id = "doc-a";
    dataset.po = {sample};
    dataset.manifest.sample_count = 1;
    return dataset;
}

}  // namespace

TEST_CASE("emit_sft_recipe pins the fixed hyperparameters") {
    auto recipe = emit_sft_recipe(fixed_sft_dataset(), "base-model-x", "sft.jsonl");
    REQUIRE(recipe.ok());
    CHECK(recipe.value().stage == Stage::sft);
    CHECK(recipe.value().epochs == 23);
    CHECK(recipe.value().qlora.dropout == 0.1);
    CHECK(recipe.value().qlora.rank == 64);
    CHECK(recipe.value().qlora.alpha == 16);
    CHECK(recipe.value().qlora.ratio() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_FALSE(recipe.value().dataset_checksum.empty());

    auto wrong = emit_sft_recipe(fixed_po_dataset(), "base", "po.jsonl");
    REQUIRE_FALSE(wrong.ok());
}

TEST_CASE("emit_orpo_recipe pins the fixed hyperparameters") {
    auto recipe = emit_orpo_recipe(fixed_po_dataset(), "base-model-x", "po.jsonl");
    REQUIRE(recipe.ok());
    CHECK(recipe.value().stage == Stage::orpo);
    CHECK(recipe.value().epochs == 10);
    CHECK(recipe.value().qlora.dropout == 0.05);
    CHECK(recipe.value().qlora.rank == 16);
    CHECK(recipe.value().qlora.alpha == 32);
    CHECK(recipe.value().qlora.ratio() == doctest::Approx(0.5).epsilon(1e-12));

    auto wrong = emit_orpo_recipe(fixed_sft_dataset(), "base", "sft.jsonl");
    REQUIRE_FALSE(wrong.ok());
}

TEST_CASE("recipes are pure functions of their inputs: re-emission is byte-identical") {
    TempDir dir("recipes");
    auto dataset = fixed_sft_dataset();
    auto first = emit_sft_recipe(dataset, "base", "sft.jsonl");
    auto second = emit_sft_recipe(dataset, "base", "sft.jsonl");
    REQUIRE(first.ok());
    REQUIRE(second.ok());
    CHECK(first.value().to_json_text() == second.value().to_json_text());

    REQUIRE(write_recipe(first.value(), dir.file("r1.json")).ok());
    REQUIRE(write_recipe(second.value(), dir.file("r2.json")).ok());
    CHECK(af_test::read_file(dir.file("r1.json")) == af_test::read_file(dir.file("r2.json")));

    auto loaded = load_recipe(dir.file("r1.json"));
    REQUIRE(loaded.ok());
    CHECK(loaded.value().epochs == 23);
    CHECK(loaded.value().qlora.rank == 64);
    CHECK(loaded.value().chat_template_id == kChatTemplateId);
}

TEST_CASE("export_dataset round trips and checksums deterministically") {
    TempDir dir("export");
    auto dataset = fixed_po_dataset();
    auto first = export_dataset(dataset, dir.file("po.jsonl"));
    REQUIRE(first.ok());
    auto again = export_dataset(dataset, dir.file("po2.jsonl"));
    REQUIRE(again.ok());
    CHECK(first.value() == again.value());

    auto loaded = distill::load_dataset(dir.file("po.jsonl"));
    REQUIRE(loaded.ok());
    CHECK(loaded.value().kind == distill::DatasetKind::po);
    REQUIRE(loaded.value().po.size() == 1);
    CHECK(loaded.value().po[0].prompt == dataset.po[0].prompt);
    CHECK(loaded.value().po[0].chosen == dataset.po[0].chosen);
    CHECK(loaded.value().po[0].rejected == dataset.po[0].rejected);
}
