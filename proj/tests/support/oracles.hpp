#pragma once

// Brute-force reference implementations for the information-theoretic
// metrics, written against explicit probability tables with direct
// summation. These stay independent of the library's TokenDistribution
// machinery: tests build texts from integer token counts, hand those to the
// implementation, and hand the equivalent probability vectors here.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace af_test::oracle {

inline double entropy_bits(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

inline double entropy_normalized(const std::vector<double>& probs) {
    size_t support = 0;
    for (double p : probs) {
        if (p > 0.0) ++support;
    }
    if (support <= 1) return 0.0;
    return entropy_bits(probs) / std::log2(static_cast<double>(support));
}

// D_KL(p || q) in nats after additive smoothing with `alpha` over a shared
// index space of `counts` (counts, not probabilities, to mirror how the
// implementation re-estimates).
inline double kl_nats_smoothed(const std::vector<uint64_t>& p_counts,
                               const std::vector<uint64_t>& q_counts, double alpha) {
    double p_total = 0.0;
    double q_total = 0.0;
    for (uint64_t c : p_counts) p_total += static_cast<double>(c);
    for (uint64_t c : q_counts) q_total += static_cast<double>(c);
    const double n = static_cast<double>(p_counts.size());
    double kl = 0.0;
    for (size_t i = 0; i < p_counts.size(); ++i) {
        const double ps = (static_cast<double>(p_counts[i]) + alpha) / (p_total + alpha * n);
        const double qs = (static_cast<double>(q_counts[i]) + alpha) / (q_total + alpha * n);
        if (ps > 0.0) kl += ps * std::log(ps / qs);
    }
    return kl;
}

// Normalized mutual information from an explicit joint table: direct
// summation for I, marginals, and entropies.
inline double mi_normalized_from_joint(const std::vector<std::vector<double>>& joint) {
    const size_t rows = joint.size();
    const size_t cols = rows ? joint[0].size() : 0;
    std::vector<double> pa(rows, 0.0);
    std::vector<double> pb(cols, 0.0);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) {
            pa[i] += joint[i][j];
            pb[j] += joint[i][j];
        }
    }
    const double ha = entropy_bits(pa);
    const double hb = entropy_bits(pb);
    if (ha <= 0.0 || hb <= 0.0) return 0.0;
    double mi = 0.0;
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) {
            const double p = joint[i][j];
            if (p > 0.0) mi += p * std::log2(p / (pa[i] * pb[j]));
        }
    }
    return mi / std::min(ha, hb);
}

// Random integer count vector (each entry >= 1) for a support of given size.
inline std::vector<uint64_t> random_counts(std::mt19937_64& rng, size_t support,
                                           uint64_t max_count = 20) {
    std::vector<uint64_t> counts(support);
    for (auto& c : counts) c = 1 + rng() % max_count;
    return counts;
}

inline std::vector<double> to_probs(const std::vector<uint64_t>& counts) {
    double total = 0.0;
    for (uint64_t c : counts) total += static_cast<double>(c);
    std::vector<double> probs(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        probs[i] = static_cast<double>(counts[i]) / total;
    }
    return probs;
}

// Text whose word distribution realizes the given counts exactly, using
// single-letter-prefixed tokens ("t0", "t1", ...).
inline std::string text_from_counts(const std::vector<uint64_t>& counts,
                                    const std::string& prefix = "t") {
    std::string text;
    for (size_t i = 0; i < counts.size(); ++i) {
        for (uint64_t k = 0; k < counts[i]; ++k) {
            if (!text.empty()) text += ' ';
            text += prefix + std::to_string(i);
        }
    }
    return text;
}

}  // namespace af_test::oracle
