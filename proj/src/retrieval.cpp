#include "lexcourt/retrieval.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "lexcourt/error.hpp"
#include "lexcourt/log.hpp"
#include "lexcourt/statutes.hpp"

namespace lexcourt {

namespace {

std::vector<std::string> distinct_in_order(const std::vector<std::string>& terms) {
    std::vector<std::string> out;
    std::unordered_map<std::string_view, bool> seen;
    seen.reserve(terms.size());
    for (const auto& t : terms) {
        if (seen.emplace(t, true).second) out.push_back(t);
    }
    return out;
}

// Dense per-thread accumulators, reset through the touched list.
struct Accumulator {
    std::vector<double> body;
    std::vector<double> statute;
    std::vector<char> seen;
    std::vector<UnitId> touched;

    void prepare(std::size_t units) {
        reset();
        if (body.size() < units) {
            body.assign(units, 0.0);
            statute.assign(units, 0.0);
            seen.assign(units, 0);
        }
        touched.clear();
    }

    void touch(UnitId u) {
        if (!seen[u]) {
            seen[u] = 1;
            touched.push_back(u);
        }
    }

    void reset() {
        for (const auto u : touched) {
            if (u >= body.size()) continue;
            body[u] = 0.0;
            statute[u] = 0.0;
            seen[u] = 0;
        }
        touched.clear();
    }
};

bool ranks_before(const ScoredUnit& a, const ScoredUnit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.unit < b.unit;
}

}  // namespace

std::string_view to_string(Scorer s) { return s == Scorer::bm25 ? "bm25" : "lm"; }

Scorer parse_scorer(std::string_view name) {
    if (name == "bm25") return Scorer::bm25;
    if (name == "lm" || name == "lm_jm" || name == "lmjm") return Scorer::lm_jm;
    throw ArgumentError("unknown scorer: " + std::string(name));
}

void ScorerParams::validate() const {
    bm25.validate();
    if (scorer == Scorer::lm_jm) lm.validate();
}

void FusionParams::validate() const {
    if (!(k_rrf > 0.0)) throw ArgumentError("k_rrf must be > 0");
    if (!(passage_boost >= 0.0)) throw ArgumentError("P_b must be >= 0");
    if (!(statute_boost >= 0.0)) throw ArgumentError("s_b must be >= 0");
    if (per_passage_depth < 1 || per_passage_depth > kMaxCaseResults) {
        throw ArgumentError("per-passage depth must lie in [1, " + std::to_string(kMaxCaseResults) + "]");
    }
}

std::vector<std::string> extract_query_terms(const std::vector<std::string>& case_terms, const FieldIndex& stats,
                                             const QueryExtractionParams& params) {
    if (params.max_terms && *params.max_terms < 1) throw ArgumentError("T must be >= 1");
    std::map<std::string_view, std::uint64_t> tf;
    for (const auto& t : case_terms) ++tf[t];

    struct Weighted {
        std::string_view term;
        double weight;
    };
    std::vector<Weighted> weighted;
    weighted.reserve(tf.size());
    const auto n = stats.unit_count();
    for (const auto& [term, count] : tf) weighted.push_back({term, tfidf_weight(count, stats.df(term), n)});
    // tf is ordered by term, so a stable sort on weight keeps ties ascending.
    std::stable_sort(weighted.begin(), weighted.end(),
                     [](const Weighted& a, const Weighted& b) { return a.weight > b.weight; });
    if (params.max_terms && weighted.size() > *params.max_terms) weighted.resize(*params.max_terms);

    std::vector<std::string> out;
    out.reserve(weighted.size());
    for (const auto& w : weighted) out.emplace_back(w.term);
    return out;
}

std::vector<std::string> extract_query_terms(const Case& query, const Index& index,
                                             const QueryExtractionParams& params) {
    std::vector<std::string> terms;
    for (const auto& p : query.passages) {
        auto pt = analyze_passage_text(p.text, index.pipeline());
        terms.insert(terms.end(), std::make_move_iterator(pt.begin()), std::make_move_iterator(pt.end()));
    }
    if (terms.empty()) warn("query case " + query.case_id + " has no index terms");
    return extract_query_terms(terms, index.field(Field::body), params);
}

std::vector<PassageQuery> build_passage_queries(const Case& query, const Index& index,
                                                const QueryExtractionParams& params) {
    PassageAnnotations annotations;
    if (!index.catalog().empty() || index.field(Field::statute).total_terms() > 0) {
        annotations = map_sections_to_statutes(query, index.catalog());
    }
    std::vector<PassageQuery> queries;
    for (const auto& p : query.passages) {
        PassageQuery q;
        q.case_id = query.case_id;
        q.passage_index = p.passage_index;
        const auto analyzed = analyze_passage_text(p.text, index.pipeline());
        q.terms = params.max_terms ? extract_query_terms(analyzed, index.field(Field::body), params)
                                   : distinct_in_order(analyzed);
        const auto& refs = annotations.refs_for({query.case_id, p.passage_index});
        q.statute_terms = statute_terms(refs);
        q.statute_ref_count = refs.size();
        if (q.terms.empty() && q.statute_terms.empty()) continue;
        queries.push_back(std::move(q));
    }
    return queries;
}

UnitRanking search_units(const Index& index, std::span<const std::string> terms,
                         std::span<const std::string> statute_terms, const ScorerParams& scorer,
                         double statute_boost, std::size_t depth, std::string_view exclude_case) {
    if (depth < 1) throw ArgumentError("search depth must be >= 1");
    thread_local Accumulator acc;
    acc.prepare(index.unit_count());

    const auto& body = index.field(Field::body);
    const auto n = body.unit_count();
    for (const auto& term : terms) {
        const auto plist = body.postings(term);
        if (plist.empty()) continue;
        if (scorer.scorer == Scorer::bm25) {
            const auto avg = body.average_length();
            for (const auto& p : plist) {
                acc.touch(p.unit);
                acc.body[p.unit] += bm25_term(p.tf, plist.size(), n, body.unit_length(p.unit), avg, scorer.bm25);
            }
        } else {
            const auto ctf = body.ctf(term);
            const auto total = body.total_terms();
            for (const auto& p : plist) {
                acc.touch(p.unit);
                acc.body[p.unit] += lm_jm_term(p.tf, body.unit_length(p.unit), ctf, total, scorer.lm);
            }
        }
    }

    if (statute_boost != 0.0) {
        const auto& statute = index.field(Field::statute);
        const auto avg = statute.average_length();
        for (const auto& term : statute_terms) {
            const auto plist = statute.postings(term);
            for (const auto& p : plist) {
                acc.touch(p.unit);
                acc.statute[p.unit] +=
                    bm25_term(p.tf, plist.size(), n, statute.unit_length(p.unit), avg, scorer.bm25);
            }
        }
    }

    UnitRanking ranking;
    ranking.reserve(acc.touched.size());
    for (const auto u : acc.touched) {
        const double total = compound_score(acc.body[u], acc.statute[u], statute_boost);
        if (total > 0.0 && (exclude_case.empty() || index.unit(u).case_id != exclude_case)) {
            ranking.push_back({u, total});
        }
    }
    acc.reset();

    if (ranking.size() > depth) {
        std::partial_sort(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(depth), ranking.end(),
                          ranks_before);
        ranking.resize(depth);
    } else {
        std::sort(ranking.begin(), ranking.end(), ranks_before);
    }
    return ranking;
}

double passage_boost(std::size_t statute_ref_count, double boost_param) {
    return statute_ref_count >= 1 ? boost_param : 1.0;
}

std::vector<RankedCase> rrf_fuse(std::span<const FusionInput> rankings, double k_rrf, std::string_view exclude_case) {
    std::map<std::string_view, double> scores;
    for (const auto& ranking : rankings) {
        std::map<std::string_view, std::size_t> best_rank;
        for (std::size_t i = 0; i < ranking.case_ids.size(); ++i) best_rank.emplace(ranking.case_ids[i], i + 1);
        for (const auto& [case_id, rank] : best_rank) {
            scores[case_id] += 1.0 / (k_rrf + static_cast<double>(rank)) * ranking.boost;
        }
    }
    std::vector<RankedCase> fused;
    fused.reserve(scores.size());
    for (const auto& [case_id, score] : scores) {
        if (!exclude_case.empty() && case_id == exclude_case) continue;
        fused.push_back({std::string(case_id), score});
    }
    std::stable_sort(fused.begin(), fused.end(),
                     [](const RankedCase& a, const RankedCase& b) { return a.score > b.score; });
    return fused;
}

CaseRanking retrieve_document_level(const Case& query, const Index& index, const RetrievalConfig& config) {
    if (index.granularity() != Granularity::document) {
        throw ArgumentError("document-level retrieval needs a document-granularity index");
    }
    CaseRanking out;
    out.query_id = query.case_id;

    QueryExtractionParams extraction = config.extraction;
    const auto terms = extract_query_terms(query, index, extraction);

    std::vector<std::string> statutes;
    if (config.fusion.statute_boost != 0.0) {
        const auto annotations = map_sections_to_statutes(query, index.catalog());
        std::vector<StatuteSectionRef> refs;
        for (const auto& [key, r] : annotations.refs) refs.insert(refs.end(), r.begin(), r.end());
        statutes = statute_terms(refs);
    }

    const auto ranking = search_units(index, terms, statutes, config.scorer, config.fusion.statute_boost,
                                      config.depth, query.case_id);
    for (const auto& su : ranking) {
        if (out.results.size() == kMaxCaseResults) break;
        out.results.push_back({index.unit(su.unit).case_id, su.score});
    }
    return out;
}

CaseRanking retrieve_passage_level(const Case& query, const Index& index, const RetrievalConfig& config) {
    if (index.granularity() != Granularity::passage) {
        throw ArgumentError("passage-level retrieval needs a passage-granularity index");
    }
    CaseRanking out;
    out.query_id = query.case_id;
    const auto queries = build_passage_queries(query, index, config.extraction);
    if (queries.empty()) {
        warn("query case " + query.case_id + " has no non-empty passages");
        return out;
    }

    std::vector<FusionInput> inputs;
    inputs.reserve(queries.size());
    for (const auto& pq : queries) {
        const auto ranking = search_units(index, pq.terms, pq.statute_terms, config.scorer,
                                          config.fusion.statute_boost, config.fusion.per_passage_depth,
                                          query.case_id);
        FusionInput input;
        input.boost = passage_boost(pq.statute_ref_count, config.fusion.passage_boost);
        input.case_ids.reserve(ranking.size());
        for (const auto& su : ranking) input.case_ids.push_back(index.unit(su.unit).case_id);
        inputs.push_back(std::move(input));
    }
    out.results = rrf_fuse(inputs, config.fusion.k_rrf, query.case_id);
    if (out.results.size() > config.depth) out.results.resize(config.depth);
    return out;
}

CaseRanking retrieve(const Case& query, const Index& index, const RetrievalConfig& config) {
    if (index.granularity() == Granularity::document) {
        RetrievalConfig doc = config;
        if (!doc.extraction.max_terms) doc.extraction.max_terms = kDefaultDocumentTerms;
        return retrieve_document_level(query, index, doc);
    }
    return retrieve_passage_level(query, index, config);
}

std::vector<CaseRanking> run_queries(const Index& index, const Collection& collection,
                                     std::span<const std::string> query_ids, const RetrievalConfig& config,
                                     Execution execution) {
    config.scorer.validate();
    config.fusion.validate();
    if (config.depth < 1 || config.depth > kMaxCaseResults) {
        throw ArgumentError("depth must lie in [1, " + std::to_string(kMaxCaseResults) + "]");
    }
    std::vector<const Case*> queries;
    queries.reserve(query_ids.size());
    for (const auto& id : query_ids) queries.push_back(&collection.at(id));

    std::vector<CaseRanking> rankings(queries.size());
    for_each_index(static_cast<std::ptrdiff_t>(queries.size()), execution,
                   [&](std::ptrdiff_t i) { rankings[i] = retrieve(*queries[i], index, config); });
    return rankings;
}

}  // namespace lexcourt
