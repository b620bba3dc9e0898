#include <cmath>

#include "alignforge/metrics.hpp"
#include "alignforge/trainplan.hpp"

namespace alignforge::metrics {

const char* to_string(PplFormat format) {
    switch (format) {
        case PplFormat::messages: return "messages";
        case PplFormat::chosen: return "chosen";
        case PplFormat::rejected: return "rejected";
    }
    return "messages";
}

Result<PplFormat> ppl_format_from_string(std::string_view s) {
    if (s == "messages") return PplFormat::messages;
    if (s == "chosen") return PplFormat::chosen;
    if (s == "rejected") return PplFormat::rejected;
    return make_error(ErrorKind::usage, "unknown perplexity format: " + std::string(s));
}

Result<PerplexityReport> dataset_perplexity(const distill::Dataset& dataset, PplFormat format,
                                            llm::Client& client, const std::string& dataset_id) {
    if (dataset.size() == 0) {
        return make_error(ErrorKind::data, "dataset is empty");
    }
    if (format == PplFormat::messages && dataset.kind != distill::DatasetKind::sft) {
        return make_error(ErrorKind::data, "messages format needs a messages-format dataset");
    }
    if (format != PplFormat::messages && dataset.kind != distill::DatasetKind::po) {
        return make_error(ErrorKind::data, "chosen/rejected formats need a preference dataset");
    }

    std::vector<llm::ScorePair> score_pairs;
    score_pairs.reserve(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
        const std::vector<llm::ChatMessage>& messages =
            format == PplFormat::messages ? dataset.sft[i].messages
            : format == PplFormat::chosen ? dataset.po[i].chosen
                                          : dataset.po[i].rejected;
        auto rendered = trainplan::render_chat_template(messages);
        if (!rendered.ok()) return rendered.error();
        // Full rendered sample scored with no masking, prompt tokens included.
        score_pairs.emplace_back(std::string{}, rendered.take());
    }

    auto results = client.score_batch(score_pairs);

    PerplexityReport report;
    report.dataset_id = dataset_id;
    report.format = to_string(format);
    report.model_id = client.config().model_id;

    double total_loglikelihood = 0.0;
    int64_t total_tokens = 0;
    size_t capability_failures = 0;
    for (const auto& result : results) {
        if (!result.ok()) {
            if (result.error().kind == ErrorKind::capability) ++capability_failures;
            ++report.failed_samples;
            continue;
        }
        const llm::ScoredContinuation& scored = result.value();
        const double mean_ll =
            scored.loglikelihood / static_cast<double>(scored.token_count);
        report.per_sample_ppl.push_back(std::exp(-mean_ll));
        total_loglikelihood += scored.loglikelihood;
        total_tokens += scored.token_count;
    }
    if (capability_failures == results.size()) {
        return make_error(ErrorKind::capability,
                          "endpoint does not support logprob scoring; perplexity needs a "
                          "logprob-capable endpoint (or a mock logprob table)");
    }
    if (total_tokens == 0) {
        return make_error(ErrorKind::data, "no samples could be scored");
    }
    report.scored_token_total = total_tokens;
    report.mean_ppl = std::exp(-total_loglikelihood / static_cast<double>(total_tokens));
    return report;
}

}  // namespace alignforge::metrics
