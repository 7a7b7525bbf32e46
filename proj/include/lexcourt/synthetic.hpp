#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexcourt/corpus.hpp"

namespace lexcourt {

struct SyntheticOptions {
    std::uint64_t seed = 1;
    std::size_t n_cases = 200;
    std::size_t vocab_size = 4000;
    /// Probability that a query family carries a planted statute section.
    /// Also scales the rate of unrelated (noise) citations. 0 disables all
    /// citations.
    double statute_density = 0.8;
    /// Defaults to n_cases / 5 (at least 1, at most n_cases / 2).
    std::optional<std::size_t> query_count;
    std::size_t max_notices = 5;
};

/// A section citation written into a generated passage, next to a mention
/// of its statute.
struct PlantedCitation {
    std::string case_id;
    std::size_t passage_index = 0;
    std::string statute_id;
    std::string section;
    /// True for the family citation shared by a query and its notices.
    bool family = false;
};

struct SyntheticCollection {
    Collection collection;
    /// Raw catalog lines (some with the usual parenthesised suffixes).
    std::vector<std::string> statute_titles;
    std::vector<PlantedCitation> plants;
};

/// Each query family (a query and its notices) shares a few "issues": small
/// sets of mid-frequency words that also occur in filler text, so relevance
/// shows up as local concentration in one or two passages rather than as rare
/// vocabulary. Background cases carry their own issues or near copies of a
/// family issue. When planted, a family also shares a statute section cited in
/// one passage of every member; noise citations use a disjoint section range.
SyntheticCollection generate_synthetic_collection(const SyntheticOptions& options);

SyntheticCollection generate_synthetic_collection(std::uint64_t seed, std::size_t n_cases, std::size_t vocab_size,
                                                  double statute_density);

}  // namespace lexcourt
