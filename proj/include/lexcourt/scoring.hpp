#pragma once

#include <cstdint>

namespace lexcourt {

struct BM25Params {
    double k1 = 1.2;
    double b = 0.75;

    void validate() const;
};

struct LMParams {
    double lambda = 0.5;

    void validate() const;
};

/// Lucene BM25 term weight:
///   idf * tf (k1 + 1) / (tf + k1 (1 - b + b len / avg_len)),
///   idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
/// Returns 0 when tf == 0.
double bm25_term(std::uint64_t tf, std::uint64_t df, std::uint64_t unit_count, std::uint64_t unit_len,
                 double avg_len, const BM25Params& params);

/// Jelinek-Mercer query likelihood in its rank-equivalent Lucene form:
///   ln(1 + ((1 - lambda) tf / len) / (lambda ctf / total_terms)).
/// Returns 0 when tf == 0.
double lm_jm_term(std::uint64_t tf, std::uint64_t unit_len, std::uint64_t ctf, std::uint64_t total_terms,
                  const LMParams& params);

/// tf * ln((N + 1) / (df + 1)); ranks a case's own terms for query extraction.
double tfidf_weight(std::uint64_t tf_in_case, std::uint64_t df, std::uint64_t unit_count);

/// body + statute * statute_boost
inline double compound_score(double s_body, double s_statute, double statute_boost) {
    return s_body + s_statute * statute_boost;
}

struct FieldScore {
    double s_body = 0.0;
    double s_statute = 0.0;
    double s_total = 0.0;
};

}  // namespace lexcourt
