#include "alignforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alignforge/text.hpp"

namespace alignforge::metrics {

const char* to_string(TokenUnit unit) { return unit == TokenUnit::word ? "word" : "char"; }

Result<TokenUnit> token_unit_from_string(std::string_view s) {
    if (s == "word") return TokenUnit::word;
    if (s == "char" || s == "character") return TokenUnit::character;
    return make_error(ErrorKind::usage, "unknown token unit: " + std::string(s));
}

double TokenDistribution::probability(const std::string& token) const {
    auto it = counts.find(token);
    if (it == counts.end() || total_count == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_count);
}

Result<TokenDistribution> build_distribution(const std::vector<std::string>& texts,
                                             TokenUnit unit) {
    TokenDistribution dist;
    dist.unit = unit;
    for (const auto& doc : texts) {
        auto tokens = unit == TokenUnit::word ? text::tokenize_words(doc)
                                              : text::tokenize_chars(doc);
        for (auto& token : tokens) {
            ++dist.counts[std::move(token)];
            ++dist.total_count;
        }
    }
    if (dist.total_count == 0) {
        return make_error(ErrorKind::data, "no tokens found: empty distribution support");
    }
    return dist;
}

double shannon_entropy_normalized(const TokenDistribution& d) {
    const size_t vocab = d.vocab_size();
    if (vocab <= 1) return 0.0;
    double entropy_bits = 0.0;
    for (const auto& [token, count] : d.counts) {
        const double p = static_cast<double>(count) / static_cast<double>(d.total_count);
        entropy_bits -= p * std::log2(p);
    }
    const double normalizer = std::log2(static_cast<double>(vocab));
    double normalized = entropy_bits / normalizer;
    return std::clamp(normalized, 0.0, 1.0);
}

Result<EntropyStats> corpus_entropy_stats(const std::vector<std::string>& texts,
                                          TokenUnit unit) {
    if (texts.empty()) {
        return make_error(ErrorKind::data, "corpus_entropy_stats needs at least one text");
    }
    EntropyStats stats;
    stats.per_document.reserve(texts.size());
    for (const auto& doc : texts) {
        auto dist = build_distribution({doc}, unit);
        if (!dist.ok()) return dist.error();
        stats.per_document.push_back(shannon_entropy_normalized(dist.value()));
    }
    const double n = static_cast<double>(stats.per_document.size());
    double sum = 0.0;
    for (double h : stats.per_document) sum += h;
    stats.mean = sum / n;
    double variance = 0.0;
    for (double h : stats.per_document) variance += (h - stats.mean) * (h - stats.mean);
    stats.stddev = std::sqrt(variance / n);
    return stats;
}

Result<double> mutual_information_normalized(
    const std::vector<std::pair<std::string, std::string>>& pairs, TokenUnit unit) {
    if (pairs.empty()) {
        return make_error(ErrorKind::data, "mutual information needs at least one pair");
    }
    const double pair_weight = 1.0 / static_cast<double>(pairs.size());
    std::map<std::pair<std::string, std::string>, double> joint;
    for (const auto& [text_a, text_b] : pairs) {
        auto dist_a = build_distribution({text_a}, unit);
        if (!dist_a.ok()) {
            return make_error(ErrorKind::data, "empty left side of a pair");
        }
        auto dist_b = build_distribution({text_b}, unit);
        if (!dist_b.ok()) {
            return make_error(ErrorKind::data, "empty right side of a pair");
        }
        for (const auto& [token_a, count_a] : dist_a.value().counts) {
            const double pa = static_cast<double>(count_a) /
                              static_cast<double>(dist_a.value().total_count);
            for (const auto& [token_b, count_b] : dist_b.value().counts) {
                const double pb = static_cast<double>(count_b) /
                                  static_cast<double>(dist_b.value().total_count);
                joint[{token_a, token_b}] += pair_weight * pa * pb;
            }
        }
    }

    std::map<std::string, double> marginal_a;
    std::map<std::string, double> marginal_b;
    for (const auto& [key, p] : joint) {
        marginal_a[key.first] += p;
        marginal_b[key.second] += p;
    }
    auto entropy_bits = [](const std::map<std::string, double>& marginal) {
        double h = 0.0;
        for (const auto& [token, p] : marginal) {
            if (p > 0.0) h -= p * std::log2(p);
        }
        return h;
    };
    const double h_a = entropy_bits(marginal_a);
    const double h_b = entropy_bits(marginal_b);
    if (h_a <= 0.0 || h_b <= 0.0) return 0.0;

    double mi_bits = 0.0;
    for (const auto& [key, p] : joint) {
        if (p <= 0.0) continue;
        const double independent = marginal_a[key.first] * marginal_b[key.second];
        mi_bits += p * std::log2(p / independent);
    }
    return std::clamp(mi_bits / std::min(h_a, h_b), 0.0, 1.0);
}

KlDivergence kl_divergence_normalized(const TokenDistribution& p, const TokenDistribution& q,
                                      double alpha) {
    std::map<std::string, std::pair<size_t, size_t>> union_counts;
    for (const auto& [token, count] : p.counts) union_counts[token].first = count;
    for (const auto& [token, count] : q.counts) union_counts[token].second = count;

    const double union_size = static_cast<double>(union_counts.size());
    const double p_denom = static_cast<double>(p.total_count) + alpha * union_size;
    const double q_denom = static_cast<double>(q.total_count) + alpha * union_size;

    double raw = 0.0;
    for (const auto& [token, counts] : union_counts) {
        const double ps = (static_cast<double>(counts.first) + alpha) / p_denom;
        const double qs = (static_cast<double>(counts.second) + alpha) / q_denom;
        if (ps <= 0.0) continue;  // alpha == 0 and token absent from p
        if (qs <= 0.0) {
            raw = std::numeric_limits<double>::infinity();
            break;
        }
        raw += ps * std::log(ps / qs);
    }
    raw = std::max(raw, 0.0);  // guard tiny negative rounding on p == q
    KlDivergence out;
    out.raw_nats = raw;
    out.normalized = 1.0 - std::exp(-raw);
    return out;
}

}  // namespace alignforge::metrics
