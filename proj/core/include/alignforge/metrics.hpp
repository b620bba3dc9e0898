#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "alignforge/distill.hpp"
#include "alignforge/error.hpp"
#include "alignforge/llm_client.hpp"

namespace alignforge::metrics {

enum class TokenUnit { word, character };

const char* to_string(TokenUnit unit);
Result<TokenUnit> token_unit_from_string(std::string_view s);

// Empirical token distribution (maximum-likelihood relative frequencies).
// Zero-count tokens are absent, so every stored probability is positive.
struct TokenDistribution {
    TokenUnit unit = TokenUnit::word;
    std::map<std::string, size_t> counts;
    size_t total_count = 0;

    size_t vocab_size() const { return counts.size(); }
    double probability(const std::string& token) const;
};

// Word unit: ASCII lowercase, Unicode-whitespace split, edge punctuation
// stripped. Character unit: Unicode scalar values.
Result<TokenDistribution> build_distribution(const std::vector<std::string>& texts,
                                             TokenUnit unit);

// H(d) / log(vocab_size), base-independent; 0 when vocab_size == 1.
double shannon_entropy_normalized(const TokenDistribution& d);

struct EntropyStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::vector<double> per_document;
};

Result<EntropyStats> corpus_entropy_stats(const std::vector<std::string>& texts, TokenUnit unit);

// Estimator "mi_outer_v1": each pair contributes the outer product of its
// per-side relative frequencies to the joint (pairs weighted equally);
// marginals derived from the joint; I(X;Y) normalized by min(H(X), H(Y)).
// Defined as 0 when either marginal entropy is 0.
Result<double> mutual_information_normalized(
    const std::vector<std::pair<std::string, std::string>>& pairs, TokenUnit unit);

struct KlDivergence {
    double raw_nats = 0.0;
    double normalized = 0.0;  // 1 - exp(-raw)
};

// Both distributions re-estimated with additive smoothing alpha over the
// union vocabulary, then D_KL(p || q) in nats. alpha = 0 disables smoothing
// (raw may then be infinite when q misses support).
KlDivergence kl_divergence_normalized(const TokenDistribution& p, const TokenDistribution& q,
                                      double alpha = 0.5);

inline constexpr const char* kEntropyEstimatorVersion = "entropy_v1";
inline constexpr const char* kMiEstimatorVersion = "mi_outer_v1";
inline constexpr const char* kKlEstimatorVersion = "kl_jeffreys_v1";
inline constexpr const char* kPplEstimatorVersion = "ppl_full_render_v1";

enum class PplFormat { messages, chosen, rejected };

const char* to_string(PplFormat format);
Result<PplFormat> ppl_format_from_string(std::string_view s);

struct PerplexityReport {
    std::string dataset_id;
    std::string format;
    std::string model_id;
    double mean_ppl = 0.0;  // exp of token-weighted mean negative loglikelihood
    std::vector<double> per_sample_ppl;
    int64_t scored_token_total = 0;
    size_t failed_samples = 0;
};

// Renders every sample with the chat template for its format and scores the
// whole rendered text (prompt tokens included) via the endpoint.
Result<PerplexityReport> dataset_perplexity(const distill::Dataset& dataset, PplFormat format,
                                            llm::Client& client,
                                            const std::string& dataset_id = "dataset");

}  // namespace alignforge::metrics
