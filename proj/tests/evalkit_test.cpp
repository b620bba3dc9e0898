#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "alignforge/assets.hpp"
#include "alignforge/evalkit.hpp"
#include "alignforge/mock_backend.hpp"
#include "support/test_util.hpp"

using namespace alignforge;
using namespace alignforge::evalkit;
using af_test::TempDir;

namespace {

BenchmarkItem mc_item(std::vector<std::string> choices, int gold,
                      const std::string& question = "Pick one.") {
    BenchmarkItem item;
    item.task_id = TaskId::arc_challenge;
    item.question = question;
    item.choices = std::move(choices);
    item.gold = gold;
    return item;
}

BenchmarkItem tqa_item(std::vector<std::string> true_answers,
                       std::vector<std::string> false_answers) {
    BenchmarkItem item;
    item.task_id = TaskId::truthfulqa_mc2;
    item.question = "Which is true?";
    item.true_answers = std::move(true_answers);
    item.false_answers = std::move(false_answers);
    return item;
}

llm::EndpointConfig fast_config() {
    llm::EndpointConfig cfg;
    cfg.backoff_base_ms = 0;
    return cfg;
}

}  // namespace

// --- loaders ----------------------------------------------------------------

TEST_CASE("arc loader handles both published record shapes") {
    TempDir dir("arc-loader");
    const std::string path = dir.file("arc.jsonl");

    SUBCASE("nested AI2 shape") {
        af_test::write_file(path, R"({"id": "q1", "question": {"stem": "Which gas?", "choices": [{"text": "Oxygen", "label": "A"}, {"text": "Gold", "label": "B"}]}, "answerKey": "A"})"
                                      "\n");
        auto items = load_task(TaskId::arc_challenge, path);
        REQUIRE(items.ok());
        REQUIRE(items.value().size() == 1);
        CHECK(items.value()[0].question == "Which gas?");
        CHECK(items.value()[0].choices == std::vector<std::string>{"Oxygen", "Gold"});
        CHECK(items.value()[0].gold == 0);
    }

    SUBCASE("flat shape with label arrays and numeric keys") {
        af_test::write_file(path, R"({"id": "q2", "question": "How many legs?", "choices": {"text": ["Six", "Eight"], "label": ["1", "2"]}, "answerKey": "2"})"
                                      "\n");
        auto items = load_task(TaskId::arc_challenge, path);
        REQUIRE(items.ok());
        CHECK(items.value()[0].gold == 1);
    }

    SUBCASE("malformed record names its location") {
        af_test::write_file(path, R"({"id": "q1", "question": {"stem": "Q", "choices": [{"text": "A", "label": "A"}, {"text": "B", "label": "B"}]}, "answerKey": "Z"})"
                                      "\n");
        auto items = load_task(TaskId::arc_challenge, path);
        REQUIRE_FALSE(items.ok());
        CHECK(items.error().message.find(":1") != std::string::npos);
    }

    SUBCASE("a directory loads every jsonl in name order") {
        af_test::write_file(dir.file("a.jsonl"), R"({"id": "x", "question": {"stem": "Q1", "choices": [{"text": "t", "label": "A"}, {"text": "u", "label": "B"}]}, "answerKey": "A"})"
                                                     "\n");
        af_test::write_file(dir.file("b.jsonl"), R"({"id": "y", "question": {"stem": "Q2", "choices": [{"text": "t", "label": "A"}, {"text": "u", "label": "B"}]}, "answerKey": "B"})"
                                                     "\n");
        std::filesystem::remove(path);
        auto items = load_task(TaskId::arc_challenge, dir.path().string());
        REQUIRE(items.ok());
        REQUIRE(items.value().size() == 2);
        CHECK(items.value()[0].question == "Q1");
        CHECK(items.value()[1].question == "Q2");
    }
}

TEST_CASE("bbq loader keeps the file's choice order and derives the gold index") {
    TempDir dir("bbq-loader");
    const std::string path = dir.file("age_ambig.json");
    af_test::write_file(path, R"({
  "name": "bbq_lite_json_age_ambig",
  "examples": [
    {"input": "Who was slow?", "target_scores": {"The grandson": 0, "Undetermined": 1, "The grandfather": 0}},
    {"input": "Who was quick?", "target_scores": {"Zeta": 1, "Alpha": 0}}
  ]
})");
    auto items = load_task(TaskId::bbq_lite_json, path);
    REQUIRE(items.ok());
    REQUIRE(items.value().size() == 2);
    CHECK(items.value()[0].choices ==
          std::vector<std::string>{"The grandson", "Undetermined", "The grandfather"});
    CHECK(items.value()[0].gold == 1);
    CHECK(items.value()[0].category == "bbq_lite_json_age_ambig");
    // Insertion order preserved, not alphabetical: Zeta stays first.
    CHECK(items.value()[1].choices == std::vector<std::string>{"Zeta", "Alpha"});
    CHECK(items.value()[1].gold == 0);
}

TEST_CASE("truthfulqa loaders") {
    TempDir dir("tqa-loader");

    SUBCASE("jsonl with mc2 targets") {
        const std::string path = dir.file("mc.jsonl");
        af_test::write_file(path, R"({"question": "Q?", "mc1_targets": {"choices": ["a", "b"], "labels": [1, 0]}, "mc2_targets": {"choices": ["a", "b", "c"], "labels": [1, 0, 1]}})"
                                      "\n");
        auto items = load_task(TaskId::truthfulqa_mc2, path);
        REQUIRE(items.ok());
        REQUIRE(items.value().size() == 1);
        CHECK(items.value()[0].true_answers == std::vector<std::string>{"a", "c"});
        CHECK(items.value()[0].false_answers == std::vector<std::string>{"b"});
    }

    SUBCASE("csv with semicolon-separated answer sets") {
        const std::string path = dir.file("TruthfulQA.csv");
        af_test::write_file(path,
                            "Type,Category,Question,Best Answer,Correct Answers,Incorrect "
                            "Answers,Source\n"
                            "Adversarial,Misc,\"What happens, really?\",Nothing,\"Nothing; Not "
                            "much\",\"You explode; You vanish\",src\n");
        auto items = load_task(TaskId::truthfulqa_mc2, path);
        REQUIRE(items.ok());
        REQUIRE(items.value().size() == 1);
        CHECK(items.value()[0].question == "What happens, really?");
        CHECK(items.value()[0].true_answers == std::vector<std::string>{"Nothing", "Not much"});
        CHECK(items.value()[0].false_answers ==
              std::vector<std::string>{"You explode", "You vanish"});
    }

    SUBCASE("empty true set is rejected") {
        const std::string path = dir.file("bad.jsonl");
        af_test::write_file(path, R"({"question": "Q?", "mc2_targets": {"choices": ["b"], "labels": [0]}})"
                                      "\n");
        auto items = load_task(TaskId::truthfulqa_mc2, path);
        REQUIRE_FALSE(items.ok());
    }
}

// --- multiple-choice scoring -------------------------------------------------

TEST_CASE("mc argmax scoring") {
    SUBCASE("higher loglikelihood wins") {
        auto item = mc_item({"A", "B"}, 0);
        auto score = mc_score_from_loglikelihoods(item, {-1.0, -2.0});
        REQUIRE(score.ok());
        CHECK(score.value().chosen_index == 0);
        CHECK(score.value().correct);
    }
    SUBCASE("byte-length normalization can disagree with the raw pick") {
        // 40-byte gold choice at -6.0 vs 8-byte choice at -2.0: raw argmax
        // picks the short one, per-byte argmax (-0.15 vs -0.25) the long one.
        std::string long_choice(40, 'x');
        std::string short_choice(8, 'y');
        auto item = mc_item({long_choice, short_choice}, 0);
        auto score = mc_score_from_loglikelihoods(item, {-6.0, -2.0});
        REQUIRE(score.ok());
        CHECK(score.value().chosen_index == 1);
        CHECK_FALSE(score.value().correct);
        CHECK(score.value().correct_norm);
    }
    SUBCASE("exact tie goes to the lowest index") {
        auto item = mc_item({"A", "B", "C"}, 0);
        auto score = mc_score_from_loglikelihoods(item, {-1.5, -1.5, -1.5});
        REQUIRE(score.ok());
        CHECK(score.value().chosen_index == 0);
    }
    SUBCASE("chosen index is invariant under strictly increasing transforms") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            auto item = mc_item({"aa", "bbb", "cccc", "d"}, 1);
            std::vector<double> lls;
            for (int i = 0; i < 4; ++i) {
                lls.push_back(-(static_cast<double>(rng() % 1000) / 100.0 + 0.01));
            }
            auto base = mc_score_from_loglikelihoods(item, lls);
            std::vector<double> transformed;
            for (double ll : lls) transformed.push_back(0.5 * ll - 3.0);  // increasing affine
            auto shifted = mc_score_from_loglikelihoods(item, transformed);
            REQUIRE(base.ok());
            REQUIRE(shifted.ok());
            CHECK(base.value().chosen_index == shifted.value().chosen_index);
        }
    }
}

TEST_CASE("score_multiple_choice scores each choice as a leading-space continuation") {
    auto backend = std::make_shared<llm::MockBackend>();
    llm::MockLogprobTable table;
    table.fallback = llm::MockTokenEntry{-5.0, false};
    table.tokens["Oxygen"] = llm::MockTokenEntry{-1.0, true};
    table.tokens["Gold"] = llm::MockTokenEntry{-2.0, false};
    backend->set_logprob_table(table);
    llm::Client client(fast_config(), backend);

    auto item = mc_item({"Oxygen", "Gold"}, 0, "Which gas do we breathe?");
    auto score = score_multiple_choice(item, client);
    REQUIRE(score.ok());
    CHECK(score.value().chosen_index == 0);
    CHECK(score.value().correct);
}

TEST_CASE("mc2 scoring") {
    SUBCASE("hand-computed likelihood ratio") {
        std::vector<double> true_lls{std::log(0.2), std::log(0.1)};
        std::vector<double> false_lls{std::log(0.3), std::log(0.4)};
        CHECK(mc2_from_loglikelihoods(true_lls, false_lls) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("all false mass at the -inf floor gives 1") {
        std::vector<double> true_lls{std::log(0.5)};
        std::vector<double> false_lls{-std::numeric_limits<double>::infinity(),
                                      -std::numeric_limits<double>::infinity()};
        CHECK(mc2_from_loglikelihoods(true_lls, false_lls) == doctest::Approx(1.0));
    }
    SUBCASE("adding a common constant leaves mc2 unchanged") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> true_lls;
            std::vector<double> false_lls;
            for (size_t i = 0; i < 1 + rng() % 4; ++i) {
                true_lls.push_back(-static_cast<double>(rng() % 800) / 100.0);
            }
            for (size_t i = 0; i < 1 + rng() % 4; ++i) {
                false_lls.push_back(-static_cast<double>(rng() % 800) / 100.0);
            }
            double base = mc2_from_loglikelihoods(true_lls, false_lls);
            double constant = -2.5 + static_cast<double>(rng() % 500) / 100.0;
            auto shift = [constant](std::vector<double> v) {
                for (double& x : v) x += constant;
                return v;
            };
            double shifted = mc2_from_loglikelihoods(shift(true_lls), shift(false_lls));
            CHECK(std::abs(base - shifted) < 1e-12);
            CHECK(base >= 0.0);
            CHECK(base <= 1.0);
            // Swapping the sets complements the score.
            CHECK(mc2_from_loglikelihoods(false_lls, true_lls) ==
                  doctest::Approx(1.0 - base).epsilon(1e-9));
        }
    }
    SUBCASE("through the scoring endpoint") {
        auto backend = std::make_shared<llm::MockBackend>();
        llm::MockLogprobTable table;
        table.tokens["t1"] = llm::MockTokenEntry{std::log(0.2), false};
        table.tokens["t2"] = llm::MockTokenEntry{std::log(0.1), false};
        table.tokens["f1"] = llm::MockTokenEntry{std::log(0.3), false};
        table.tokens["f2"] = llm::MockTokenEntry{std::log(0.4), false};
        backend->set_logprob_table(table);
        llm::Client client(fast_config(), backend);
        auto item = tqa_item({"t1", "t2"}, {"f1", "f2"});
        auto mc2 = score_truthfulqa_mc2(item, client);
        REQUIRE(mc2.ok());
        CHECK(mc2.value() == doctest::Approx(0.3).epsilon(1e-12));
    }
}

// --- extraction & generation --------------------------------------------------

TEST_CASE("extract_choice rule cascade") {
    const std::vector<std::string> choices{"first option", "second option", "third option"};

    CHECK(extract_choice("(A)", choices).index == 0);
    CHECK(extract_choice("The answer is (B)", choices).index == 1);
    CHECK(extract_choice("I pick C.", choices).index == 2);
    CHECK(extract_choice("b) looks right", choices).index == 1);
    CHECK(extract_choice("answer is a", choices).index == 0);

    SUBCASE("full-text containment when no letter appears") {
        auto extraction = extract_choice("clearly the second option holds", choices);
        CHECK(extraction.index == 1);
        CHECK(extraction.rule == "full_text");
    }
    SUBCASE("two full texts present means ambiguity, then token-overlap tie, abstain") {
        auto extraction =
            extract_choice("the first option or the second option, hard to say", choices);
        CHECK_FALSE(extraction.index.has_value());
        CHECK(extraction.rule == "abstain");
    }
    SUBCASE("empty generation abstains") {
        CHECK_FALSE(extract_choice("", choices).index.has_value());
    }
    SUBCASE("letters beyond the choice count do not match") {
        CHECK_FALSE(extract_choice("(F)", choices).index.has_value());
    }
    SUBCASE("never returns an out-of-range index on random garbage") {
        std::mt19937_64 rng(17);
        const std::string alphabet = "aBc (D). xyz answer is ?!";
        for (int trial = 0; trial < 300; ++trial) {
            std::string garbage;
            for (size_t i = 0; i < rng() % 40; ++i) garbage += alphabet[rng() % alphabet.size()];
            auto extraction = extract_choice(garbage, choices);
            if (extraction.index) {
                CHECK(*extraction.index >= 0);
                CHECK(*extraction.index < 3);
            }
        }
    }
}

TEST_CASE("run_generate_until extracts letters and records refusals as abstains") {
    auto backend = std::make_shared<llm::MockBackend>();
    llm::MockFixture letter;
    letter.user_contains = "Which gas";
    letter.steps.push_back(llm::MockStep{200, false, "The answer is (B)", 0});
    backend->add_fixture(letter);
    llm::MockFixture refusal;
    refusal.user_contains = "refused";
    refusal.steps.push_back(llm::MockStep{200, true, "", 0});
    backend->add_fixture(refusal);
    llm::Client client(fast_config(), backend);

    EvalConfig config;
    config.mode = EvalMode::generate_until;

    auto outcome = run_generate_until(mc_item({"Oxygen", "Gold"}, 0, "Which gas?"),
                                      "You are a helpful AI Assistant", client, config);
    REQUIRE(outcome.ok());
    CHECK(outcome.value().extraction.index == 1);

    auto refused = run_generate_until(mc_item({"A", "B"}, 0, "refused question"),
                                      "You are a helpful AI Assistant", client, config);
    REQUIRE(refused.ok());
    CHECK(refused.value().refused);
    CHECK_FALSE(refused.value().extraction.index.has_value());

    SUBCASE("generate mode requires a stop condition") {
        EvalConfig bad = config;
        bad.stop.clear();
        auto result = run_generate_until(mc_item({"A", "B"}, 0), "sp", client, bad);
        REQUIRE_FALSE(result.ok());
        CHECK(result.error().kind == ErrorKind::usage);
    }
}

// --- text metrics --------------------------------------------------------------

TEST_CASE("bleu fixtures") {
    CHECK(bleu("the cat sat", {"the cat sat"}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bleu("alpha beta", {"gamma delta"}) == 0.0);

    // "the cat sat" vs "the cat sat down": p1 = 3/3, smoothed p2 = (2+1)/(2+1),
    // p3 = (1+1)/(1+1), p4 = (0+1)/(0+1); BP = exp(1 - 4/3). BLEU = exp(-1/3).
    CHECK(bleu("the cat sat", {"the cat sat down"}) ==
          doctest::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-6));

    SUBCASE("reference order does not matter") {
        std::vector<std::string> refs{"the cat sat down", "a cat sat", "the dog ran"};
        double forward = bleu("the cat sat", refs);
        std::reverse(refs.begin(), refs.end());
        CHECK(bleu("the cat sat", refs) == doctest::Approx(forward).epsilon(1e-12));
    }
}

TEST_CASE("rouge fixtures") {
    auto identity = rouge("a b c", {"a b c"});
    CHECK(identity.rouge1_f == doctest::Approx(1.0));
    CHECK(identity.rouge2_f == doctest::Approx(1.0));
    CHECK(identity.rougeL_f == doctest::Approx(1.0));

    auto disjoint = rouge("a b c", {"x y z"});
    CHECK(disjoint.rouge1_f == 0.0);
    CHECK(disjoint.rouge2_f == 0.0);
    CHECK(disjoint.rougeL_f == 0.0);

    // LCS("a b c", "a x c") = "a c": P = R = 2/3, F = 2/3.
    CHECK(rouge("a b c", {"a x c"}).rougeL_f == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    SUBCASE("max over references, order-invariant") {
        std::vector<std::string> refs{"a x c", "a b c"};
        auto best = rouge("a b c", refs);
        CHECK(best.rouge1_f == doctest::Approx(1.0));
        std::reverse(refs.begin(), refs.end());
        auto swapped = rouge("a b c", refs);
        CHECK(swapped.rougeL_f == doctest::Approx(best.rougeL_f));
    }
}

TEST_CASE("truthfulqa generation accuracy and its strict tie rule") {
    auto item = tqa_item({"water is wet"}, {"water is dry stuff"});
    auto hit = truthfulqa_gen_accuracy("water is wet", item);
    CHECK(hit.bleu_acc);
    CHECK(hit.rouge1_acc);

    auto miss = truthfulqa_gen_accuracy("water is dry stuff", item);
    CHECK_FALSE(miss.bleu_acc);
    CHECK_FALSE(miss.rouge1_acc);

    // Exact metric tie (identical true and false references) scores false.
    auto tie_item = tqa_item({"same answer"}, {"same answer"});
    auto tie = truthfulqa_gen_accuracy("same answer", tie_item);
    CHECK_FALSE(tie.bleu_acc);
    CHECK_FALSE(tie.rouge1_acc);
}

// --- prompts and reporting ------------------------------------------------------

TEST_CASE("ica prompt construction") {
    auto principles = distill::bundled_principles();
    std::string v1 = build_ica_prompt(principles, std::nullopt);
    CHECK(v1.rfind("You are a helpful assistant working for ABC Australia", 0) == 0);
    for (const auto& principle : principles.principles) {
        CHECK(v1.find(principle.name) != std::string::npos);
        CHECK(v1.find(principle.definition) != std::string::npos);
    }
    CHECK(v1.find("Here is an example of a question/answer") == std::string::npos);

    std::string v2 = build_ica_prompt(principles, std::make_pair(std::string("EQ?"),
                                                                 std::string("EA.")));
    CHECK(v2.rfind(v1, 0) == 0);  // v1 is a prefix of v2
    CHECK(v2.find("Here is an example of a question/answer aligned with these principles:") !=
          std::string::npos);
    CHECK(v2.find("Question: EQ?\nAnswer: EA.") != std::string::npos);

    EvalConfig config;
    config.system_prompt_id = "baseline";
    auto baseline = resolve_system_prompt(config, principles);
    REQUIRE(baseline.ok());
    CHECK(baseline.value() == "You are a helpful AI Assistant");

    config.system_prompt_id = "rag_v1";
    auto missing = resolve_system_prompt(config, principles);
    REQUIRE_FALSE(missing.ok());
    config.custom_system_prompt = "Internal tool prompt text";
    auto custom = resolve_system_prompt(config, principles);
    REQUIRE(custom.ok());
    CHECK(custom.value() == "Internal tool prompt text");
}

TEST_CASE("relative improvement") {
    CHECK(relative_improvement(0.5, 0.5).value() == doctest::Approx(0.0));
    CHECK(format_percent(relative_improvement(0.6175, 0.5).value()) == "23.50");
    CHECK(format_percent(relative_improvement(0.25, 0.5).value()) == "-50.00");
    CHECK_FALSE(relative_improvement(0.5, 0.0).ok());
    CHECK_FALSE(relative_improvement(0.5, -1.0).ok());
}

namespace {

// Mock + items where `correct_of` out of `total` items are answered right in
// both eval modes.
struct EvalFixture {
    std::vector<BenchmarkItem> items;
    std::shared_ptr<llm::MockBackend> backend = std::make_shared<llm::MockBackend>();

    EvalFixture(int total, int correct_of) {
        llm::MockLogprobTable table;
        table.fallback = llm::MockTokenEntry{-9.0, false};
        for (int i = 0; i < total; ++i) {
            std::vector<std::string> choices;
            for (int c = 0; c < 4; ++c) {
                choices.push_back("w" + std::to_string(i) + std::to_string(c));
            }
            int gold = i % 4;
            bool right = i < correct_of;
            int best = right ? gold : (gold + 1) % 4;
            for (int c = 0; c < 4; ++c) {
                table.tokens[choices[c]] = llm::MockTokenEntry{c == best ? -1.0 : -4.0, false};
            }
            items.push_back(mc_item(choices, gold, "Synthetic question " + std::to_string(i)));
            items.back().task_id = TaskId::arc_challenge;

            llm::MockFixture generation;
            generation.user_contains = "Synthetic question " + std::to_string(i) + "\n";
            generation.steps.push_back(llm::MockStep{
                200, false,
                std::string("The answer is (") + static_cast<char>('A' + best) + ")", 0});
            backend->add_fixture(generation);
        }
        backend->set_logprob_table(table);
    }

    llm::Client client() { return llm::Client(fast_config(), backend); }
};

}  // namespace

TEST_CASE("run_eval end to end on the mock, both modes agree") {
    EvalFixture fixture(20, 15);
    auto principles = distill::bundled_principles();

    EvalConfig mc_config;
    mc_config.task_id = TaskId::arc_challenge;
    mc_config.mode = EvalMode::loglikelihood_mc;
    auto client = fixture.client();
    auto mc_report = run_eval(fixture.items, mc_config, client, principles);
    REQUIRE(mc_report.ok());
    REQUIRE(mc_report.value().aggregates.accuracy.has_value());
    CHECK(*mc_report.value().aggregates.accuracy == doctest::Approx(0.75).epsilon(1e-12));

    EvalConfig gen_config = mc_config;
    gen_config.mode = EvalMode::generate_until;
    gen_config.system_prompt_id = "baseline";
    auto gen_report = run_eval(fixture.items, gen_config, client, principles);
    REQUIRE(gen_report.ok());
    REQUIRE(gen_report.value().aggregates.accuracy.has_value());
    CHECK(*gen_report.value().aggregates.accuracy == doctest::Approx(0.75).epsilon(1e-12));

    SUBCASE("aggregates equal recomputation from per-item records") {
        auto recomputed = recompute_aggregates(mc_report.value().per_item);
        CHECK(recomputed.n_items == mc_report.value().aggregates.n_items);
        CHECK(recomputed.accuracy == mc_report.value().aggregates.accuracy);
        CHECK(recomputed.accuracy_norm == mc_report.value().aggregates.accuracy_norm);
    }

    SUBCASE("reports are byte-identical across identical runs") {
        auto again = run_eval(fixture.items, mc_config, client, principles);
        REQUIRE(again.ok());
        CHECK(again.value().to_json().dump(2) == mc_report.value().to_json().dump(2));
    }

    SUBCASE("limit caps the items") {
        EvalConfig limited = mc_config;
        limited.limit = 4;
        auto report = run_eval(fixture.items, limited, client, principles);
        REQUIRE(report.ok());
        CHECK(report.value().aggregates.n_items == 4);
    }

    SUBCASE("baseline deltas carry relative improvements") {
        auto deltas = baseline_deltas(gen_report.value(), mc_report.value());
        REQUIRE(deltas.ok());
        CHECK(deltas.value().contains("accuracy"));
        CHECK(deltas.value()["accuracy"]["relative_pct_str"] == "0.00");
    }

    SUBCASE("report json round trips") {
        auto parsed = report_from_json(mc_report.value().to_json());
        REQUIRE(parsed.ok());
        CHECK(parsed.value().aggregates.accuracy == mc_report.value().aggregates.accuracy);
        CHECK(parsed.value().config.task_id == TaskId::arc_challenge);
    }
}

TEST_CASE("run_eval on truthfulqa items aggregates mc2 and generation accuracy") {
    auto backend = std::make_shared<llm::MockBackend>();
    llm::MockLogprobTable table;
    table.tokens["t1"] = llm::MockTokenEntry{std::log(0.2), false};
    table.tokens["t2"] = llm::MockTokenEntry{std::log(0.1), false};
    table.tokens["f1"] = llm::MockTokenEntry{std::log(0.3), false};
    table.tokens["f2"] = llm::MockTokenEntry{std::log(0.4), false};
    backend->set_logprob_table(table);
    backend->set_default_response("t1");
    llm::Client client(fast_config(), backend);

    std::vector<BenchmarkItem> items{tqa_item({"t1", "t2"}, {"f1", "f2"})};
    auto principles = distill::bundled_principles();

    EvalConfig config;
    config.task_id = TaskId::truthfulqa_mc2;
    config.mode = EvalMode::loglikelihood_mc;
    auto mc_report = run_eval(items, config, client, principles);
    REQUIRE(mc_report.ok());
    REQUIRE(mc_report.value().aggregates.mc2.has_value());
    CHECK(*mc_report.value().aggregates.mc2 == doctest::Approx(0.3).epsilon(1e-12));

    config.mode = EvalMode::generate_until;
    auto gen_report = run_eval(items, config, client, principles);
    REQUIRE(gen_report.ok());
    REQUIRE(gen_report.value().aggregates.bleu_acc.has_value());
    CHECK(*gen_report.value().aggregates.bleu_acc == doctest::Approx(0.0));
    REQUIRE(gen_report.value().aggregates.rouge1_acc.has_value());
}
