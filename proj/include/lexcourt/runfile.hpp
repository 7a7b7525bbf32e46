#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lexcourt/retrieval.hpp"

namespace lexcourt {

/// TREC run format: "query_id Q0 case_id rank score run_tag", ranks 1-based
/// and contiguous per query. Queries without results produce no rows.
std::string format_run(std::span<const CaseRanking> rankings, const std::string& run_tag);
void write_run(std::span<const CaseRanking> rankings, const std::string& run_tag, const std::filesystem::path& path);

/// Parses a run file; rows of a query are ordered by rank. Query order is the
/// order of first appearance. Malformed rows throw ValidationError.
std::vector<CaseRanking> parse_run(const std::string& text);
std::vector<CaseRanking> read_run(const std::filesystem::path& path);

/// "query_id<TAB>case_id" for the first `cutoff` results of every query.
std::string format_submission(std::span<const CaseRanking> rankings, std::size_t cutoff);

}  // namespace lexcourt
