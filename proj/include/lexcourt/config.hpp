#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "lexcourt/index.hpp"
#include "lexcourt/retrieval.hpp"

namespace lexcourt {

/// Every tunable of an experiment. Serialized as flat key=value text with
/// the keys scorer, k1, b, lambda, T, k_rrf, P_b, s_b, depth, passage_depth, granularity,
/// stopwords_path, placeholders_path and cutoff.
struct ExperimentConfig {
    Scorer scorer = Scorer::lm_jm;
    double k1 = 0.66;
    double b = 0.59;
    double lambda = 0.56;
    /// Absent: all distinct terms for passage runs, 200 for document runs.
    std::optional<std::size_t> max_terms;
    double k_rrf = 60.0;
    double passage_boost = 1.0;
    double statute_boost = 0.0;
    std::size_t depth = 100;
    /// Units kept per passage query before fusion; defaults to depth.
    std::optional<std::size_t> passage_depth;
    Granularity granularity = Granularity::passage;
    std::optional<std::filesystem::path> stopwords_path;
    std::optional<std::filesystem::path> placeholders_path;
    std::optional<std::size_t> cutoff;

    RetrievalConfig retrieval() const;
    PipelineConfig pipeline() const;

    /// Applies one key=value pair; unknown keys and bad values throw.
    void set(const std::string& key, const std::string& value);
    std::string to_text() const;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Parses "key=value" lines ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace lexcourt
