#include "lexcourt/scoring.hpp"

#include <cmath>
#include <string>

#include "lexcourt/error.hpp"

namespace lexcourt {

void BM25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw ArgumentError("k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw ArgumentError("b must lie in [0, 1]");
}

void LMParams::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ArgumentError("lambda must lie in (0, 1)");
}

double bm25_term(std::uint64_t tf, std::uint64_t df, std::uint64_t unit_count, std::uint64_t unit_len,
                 double avg_len, const BM25Params& params) {
    if (unit_count < 1) throw ArgumentError("bm25: N must be >= 1");
    if (!(avg_len > 0.0)) throw ArgumentError("bm25: average length must be > 0");
    if (tf == 0) return 0.0;
    if (df < 1 || df > unit_count) throw ArgumentError("bm25: df must lie in [1, N] for a present term");
    const auto n = static_cast<double>(unit_count);
    const auto d = static_cast<double>(df);
    const auto f = static_cast<double>(tf);
    const double idf = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    const double norm = params.k1 * (1.0 - params.b + params.b * static_cast<double>(unit_len) / avg_len);
    return idf * f * (params.k1 + 1.0) / (f + norm);
}

double lm_jm_term(std::uint64_t tf, std::uint64_t unit_len, std::uint64_t ctf, std::uint64_t total_terms,
                  const LMParams& params) {
    if (tf == 0) return 0.0;
    if (ctf == 0) throw std::logic_error("lm_jm: term occurs in a unit but has collection frequency 0");
    if (unit_len < tf) throw ArgumentError("lm_jm: unit length smaller than tf");
    if (total_terms < ctf) throw ArgumentError("lm_jm: total term count smaller than ctf");
    const double doc_model = (1.0 - params.lambda) * static_cast<double>(tf) / static_cast<double>(unit_len);
    const double collection_model = params.lambda * static_cast<double>(ctf) / static_cast<double>(total_terms);
    return std::log1p(doc_model / collection_model);
}

double tfidf_weight(std::uint64_t tf_in_case, std::uint64_t df, std::uint64_t unit_count) {
    if (tf_in_case == 0) return 0.0;
    return static_cast<double>(tf_in_case) *
           std::log((static_cast<double>(unit_count) + 1.0) / (static_cast<double>(df) + 1.0));
}

}  // namespace lexcourt
