#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexcourt/corpus.hpp"
#include "lexcourt/execution.hpp"
#include "lexcourt/index.hpp"
#include "lexcourt/scoring.hpp"

namespace lexcourt {

/// Case-level result lists never exceed this many entries.
inline constexpr std::size_t kMaxCaseResults = 100;
/// Query term budget for document-level runs when none is configured.
inline constexpr std::size_t kDefaultDocumentTerms = 200;

enum class Scorer { bm25, lm_jm };

std::string_view to_string(Scorer s);
Scorer parse_scorer(std::string_view name);

struct ScorerParams {
    Scorer scorer = Scorer::lm_jm;
    BM25Params bm25{0.66, 0.59};
    LMParams lm{0.56};

    void validate() const;
};

struct QueryExtractionParams {
    /// Number of query terms to keep; absent keeps every distinct term.
    std::optional<std::size_t> max_terms;
};

struct FusionParams {
    double k_rrf = 60.0;
    /// P_b: boost of passage queries citing at least one statute section.
    double passage_boost = 1.0;
    /// s_b: weight of the statute-field score in the compound score.
    double statute_boost = 0.0;
    std::size_t per_passage_depth = 100;

    void validate() const;
};

struct RetrievalConfig {
    ScorerParams scorer;
    QueryExtractionParams extraction;
    FusionParams fusion;
    /// Unit depth of document-level searches.
    std::size_t depth = 100;
};

struct ScoredUnit {
    UnitId unit = 0;
    double score = 0.0;

    bool operator==(const ScoredUnit&) const = default;
};

using UnitRanking = std::vector<ScoredUnit>;

struct RankedCase {
    std::string case_id;
    double score = 0.0;

    bool operator==(const RankedCase&) const = default;
};

struct CaseRanking {
    std::string query_id;
    /// Descending score, ties by ascending case_id.
    std::vector<RankedCase> results;

    bool operator==(const CaseRanking&) const = default;
};

struct PassageQuery {
    std::string case_id;
    std::size_t passage_index = 0;
    std::vector<std::string> terms;
    std::vector<std::string> statute_terms;
    /// Number of statute-section refs of the passage.
    std::size_t statute_ref_count = 0;
};

/// Ranks the distinct terms of `case_terms` by tfidf_weight (tf counted in
/// case_terms, df and N from `stats`) and keeps the best max_terms. Ties go
/// to the lexicographically smaller term. Without a limit all distinct terms
/// are returned in that order.
std::vector<std::string> extract_query_terms(const std::vector<std::string>& case_terms, const FieldIndex& stats,
                                             const QueryExtractionParams& params);

/// Analyzes a whole case with the index pipeline and extracts its query terms.
std::vector<std::string> extract_query_terms(const Case& query, const Index& index,
                                             const QueryExtractionParams& params);

/// One query per passage of `query`, annotated with the index catalog.
/// Terms are the distinct analyzed tokens, reduced to the top max_terms by
/// tfidf when a limit is set. Passages without any terms are skipped.
std::vector<PassageQuery> build_passage_queries(const Case& query, const Index& index,
                                                const QueryExtractionParams& params);

/// Scores every unit matching a query term: body field with the configured
/// scorer, statute field with BM25, combined as body + statute * s_b.
/// Returns the best `depth` units with a positive total (ties by ascending
/// unit id). Units of `exclude_case` are skipped.
UnitRanking search_units(const Index& index, std::span<const std::string> terms,
                         std::span<const std::string> statute_terms, const ScorerParams& scorer,
                         double statute_boost, std::size_t depth, std::string_view exclude_case = {});

/// P_b when the passage cites at least one section, 1 otherwise.
double passage_boost(std::size_t statute_ref_count, double boost_param);

struct FusionInput {
    /// Case of each ranked passage, best first (repeats allowed).
    std::vector<std::string_view> case_ids;
    double boost = 1.0;
};

/// Reciprocal rank fusion with per-ranking boost:
///   score(c) = sum over rankings r containing c of 1 / (k_rrf + r(c)) * boost_r
/// where r(c) is the 1-based rank of the first passage of c in r.
/// `exclude_case` is dropped from the output.
std::vector<RankedCase> rrf_fuse(std::span<const FusionInput> rankings, double k_rrf,
                                 std::string_view exclude_case = {});

/// Top-T query of the whole case against a document-granularity index.
CaseRanking retrieve_document_level(const Case& query, const Index& index, const RetrievalConfig& config);

/// Passage queries against a passage-granularity index, fused with RRF.
CaseRanking retrieve_passage_level(const Case& query, const Index& index, const RetrievalConfig& config);

/// Dispatches on the index granularity.
CaseRanking retrieve(const Case& query, const Index& index, const RetrievalConfig& config);

/// Runs every query; the parallel path spreads queries over OpenMP threads.
/// Output order follows query_ids.
std::vector<CaseRanking> run_queries(const Index& index, const Collection& collection,
                                     std::span<const std::string> query_ids, const RetrievalConfig& config,
                                     Execution execution = Execution::parallel);

}  // namespace lexcourt
