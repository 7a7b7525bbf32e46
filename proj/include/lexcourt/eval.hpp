#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexcourt/corpus.hpp"
#include "lexcourt/retrieval.hpp"

namespace lexcourt {

struct RankMetrics {
    std::size_t k = 0;
    std::uint64_t true_positives = 0;
    std::uint64_t retrieved = 0;
    std::uint64_t relevant = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const RankMetrics&) const = default;
};

struct SplitConfig {
    std::size_t train_count = 700;
};

/// Micro-averaged precision, recall and F1 at every cutoff 1..max_rank.
/// Retrieved counts use min(k, |ranking|) so short rankings are not charged
/// for empty slots. Throws ValidationError if a run query has no qrels.
std::vector<RankMetrics> metrics_at_ranks(std::span<const CaseRanking> runs, const Qrels& qrels,
                                          std::size_t max_rank = 100);

/// Smallest k with the highest F1.
std::size_t select_cutoff(std::span<const RankMetrics> metrics);

/// Metrics row at cutoff k (1-based).
const RankMetrics& metrics_at(std::span<const RankMetrics> metrics, std::size_t k);

/// First train_count queries train, the rest dev.
std::pair<std::vector<std::string>, std::vector<std::string>> split_train_dev(std::span<const std::string> queries,
                                                                              const SplitConfig& config);

/// "k\tprecision\trecall\tf1" header plus one row per rank. Reals are written
/// in shortest round-trip form.
std::string metrics_to_tsv(std::span<const RankMetrics> metrics);
std::vector<RankMetrics> metrics_from_tsv(const std::string& text);

/// {"cutoff": k, "precision": .., "recall": .., "f1": .., "queries": n}
std::string cutoff_summary_json(std::span<const RankMetrics> metrics, std::size_t queries);

/// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace lexcourt
