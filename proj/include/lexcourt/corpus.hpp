#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexcourt {

struct Passage {
    std::string case_id;
    std::size_t passage_index = 0;
    std::string text;
};

struct Case {
    std::string case_id;
    std::string raw_text;
    std::vector<Passage> passages;
    bool is_query = false;
};

using Qrels = std::map<std::string, std::set<std::string>>;

/// A case collection. Immutable after loading; all containers are ordered so
/// iteration is deterministic.
struct Collection {
    std::map<std::string, Case> cases;
    /// query case_id -> relevant (notice) case_ids. Empty for test collections.
    Qrels qrels;
    /// Query ids in evaluation order: the order of the query list file when
    /// one was given, lexicographic case_id order otherwise.
    std::vector<std::string> query_order;

    bool labeled() const { return !qrels.empty(); }
    const Case& at(const std::string& case_id) const;
    std::vector<std::string> query_ids() const { return query_order; }
};

/// Builds a Case from its text, segmenting it into passages.
Case make_case(std::string case_id, std::string raw_text, bool is_query = false);

/// Loads every "*.txt" file of corpus_dir (lexicographic filename order);
/// case_id is the filename stem. Query cases are the ids of query_list_path
/// when given, otherwise the qrels keys.
Collection load_collection(const std::filesystem::path& corpus_dir,
                           const std::optional<std::filesystem::path>& qrels_path = std::nullopt,
                           const std::optional<std::filesystem::path>& query_list_path = std::nullopt);

/// Two-column TSV: query_id<TAB>notice_id. '#' starts a comment.
Qrels load_qrels(const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, const std::filesystem::path& path);

/// One id per line, '#' comments and blank lines ignored.
std::vector<std::string> load_id_list(const std::filesystem::path& path);

/// Checks the qrels/query invariants; throws ValidationError naming every
/// offending id.
void validate_collection(const Collection& collection);

/// Passage boundaries are runs of blank lines and lines starting with a
/// bracketed paragraph number ("[12] ..."). Segments are trimmed; empty ones
/// are dropped. Text without boundaries is a single passage.
std::vector<std::string> split_passages(std::string_view case_text);

template <typename T>
struct Summary {
    T max{};
    double median = 0.0;
    double mean = 0.0;
};

struct CollectionStats {
    std::size_t total_cases = 0;
    std::size_t query_cases = 0;
    Summary<std::size_t> tokens_per_document;
    /// Absent for unlabeled collections.
    std::optional<Summary<std::size_t>> notice_cases_per_query;
};

/// Token counts use raw tokenize() output, before normalization.
CollectionStats collection_stats(const Collection& collection);

/// JSON object mirroring the CollectionStats field names.
std::string stats_to_json(const CollectionStats& stats);

/// Writes dir/cases/<id>.txt, dir/qrels.tsv (labeled collections only) and
/// dir/queries.txt.
void write_collection(const Collection& collection, const std::filesystem::path& dir);

}  // namespace lexcourt
