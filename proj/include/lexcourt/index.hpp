#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexcourt/corpus.hpp"
#include "lexcourt/execution.hpp"
#include "lexcourt/statutes.hpp"
#include "lexcourt/textproc.hpp"

namespace lexcourt {

enum class Granularity { document, passage };
enum class Field { body, statute };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view name);
Field parse_field(std::string_view name);

using UnitId = std::uint32_t;

struct Posting {
    UnitId unit = 0;
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct RetrievalUnit {
    UnitId unit_id = 0;
    std::string case_id;
    /// Absent for document-level units.
    std::optional<std::uint32_t> passage_index;
    std::uint32_t body_length = 0;
    std::uint32_t statute_length = 0;

    bool operator==(const RetrievalUnit&) const = default;
};

/// Postings and statistics of one field. Terms are stored sorted, so term ids
/// follow lexicographic order and the on-disk layout is canonical.
class FieldIndex {
  public:
    std::size_t unit_count() const { return unit_lengths_.size(); }
    std::uint64_t total_terms() const { return total_terms_; }
    double average_length() const;
    std::size_t vocabulary_size() const { return terms_.size(); }

    /// Empty span for unknown terms.
    std::span<const Posting> postings(std::string_view term) const;
    std::uint32_t df(std::string_view term) const { return static_cast<std::uint32_t>(postings(term).size()); }
    std::uint64_t ctf(std::string_view term) const;
    std::uint32_t unit_length(UnitId unit) const { return unit_lengths_[unit]; }

    const std::vector<std::string>& terms() const { return terms_; }
    std::span<const Posting> postings_at(std::size_t term_id) const { return postings_[term_id]; }
    std::uint64_t ctf_at(std::size_t term_id) const { return ctf_[term_id]; }

    /// Builds the field from per-unit term lists (unit id = position).
    static FieldIndex build(const std::vector<std::vector<std::string>>& unit_terms);

    bool operator==(const FieldIndex&) const = default;

  private:
    friend class IndexSerializer;

    std::optional<std::size_t> term_id(std::string_view term) const;

    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<std::uint64_t> ctf_;
    std::vector<std::uint32_t> unit_lengths_;
    std::uint64_t total_terms_ = 0;
};

struct IndexBuildOptions {
    Granularity granularity = Granularity::passage;
    PipelineConfig pipeline = PipelineConfig::defaults();
    Execution execution = Execution::parallel;
    /// Catalog behind the annotations; stored so queries are annotated alike.
    StatuteCatalog catalog;
};

/// Analyzes a passage: numbers survive only when detected as cued section
/// citations in the same passage.
std::vector<std::string> analyze_passage_text(std::string_view text, const PipelineConfig& pipeline);

/// Statute-field terms of a list of refs, first occurrence order, distinct.
std::vector<std::string> statute_terms(const std::vector<StatuteSectionRef>& refs);

/// Immutable two-field inverted index over retrieval units.
class Index {
  public:
    static Index build(const Collection& collection, const PassageAnnotations* annotations,
                       const IndexBuildOptions& options);

    Granularity granularity() const { return granularity_; }
    const PipelineConfig& pipeline() const { return pipeline_; }
    /// Catalog the annotations were produced with (empty when statute-free).
    /// Query cases are annotated with it so both sides agree.
    const StatuteCatalog& catalog() const { return catalog_; }

    std::size_t unit_count() const { return units_.size(); }
    const std::vector<RetrievalUnit>& units() const { return units_; }
    const RetrievalUnit& unit(UnitId id) const { return units_[id]; }

    const FieldIndex& field(Field f) const { return f == Field::body ? body_ : statute_; }
    std::span<const Posting> lookup(Field f, std::string_view term) const { return field(f).postings(term); }
    std::span<const Posting> lookup(std::string_view field_name, std::string_view term) const;

    /// Unit ids belonging to a case, in passage order.
    std::span<const UnitId> units_of(std::string_view case_id) const;

    void save(const std::filesystem::path& path) const;
    static Index load(const std::filesystem::path& path);

    bool operator==(const Index& other) const;

  private:
    friend class IndexSerializer;
    void rebuild_case_map();

    Granularity granularity_ = Granularity::passage;
    PipelineConfig pipeline_;
    StatuteCatalog catalog_;
    std::vector<RetrievalUnit> units_;
    FieldIndex body_;
    FieldIndex statute_;
    std::vector<std::pair<std::string, std::vector<UnitId>>> case_units_;  // sorted by case id
};

inline constexpr std::string_view kIndexMagic = "LEXCOURT-IDX v1";

}  // namespace lexcourt
