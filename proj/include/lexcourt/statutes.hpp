#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexcourt/corpus.hpp"
#include "lexcourt/execution.hpp"

namespace lexcourt {

/// Statute assigned to a section number that never co-occurs with a mention.
inline constexpr std::string_view kUnknownStatute = "UNKNOWN";

struct StatuteTitle {
    std::string statute_id;
    std::string raw_title;
    std::string cleaned_title;
    std::optional<std::string> acronym;
};

class StatuteCatalog {
  public:
    StatuteCatalog() = default;

    /// Cleans each title and merges entries whose cleaned titles share a
    /// statute_id. The first raw title seen for an id is kept.
    static StatuteCatalog from_titles(const std::vector<std::string>& raw_titles);

    const std::vector<StatuteTitle>& titles() const { return titles_; }
    bool empty() const { return titles_.empty(); }
    std::size_t size() const { return titles_.size(); }

    /// lowercase cleaned title -> statute_id
    const std::map<std::string, std::string>& title_index() const { return title_index_; }
    /// acronym -> statute_ids
    const std::map<std::string, std::set<std::string>>& acronym_index() const { return acronym_index_; }

    const StatuteTitle* find(std::string_view statute_id) const;
    /// Raw titles in catalog order; from_titles(raw_titles()) rebuilds the catalog.
    std::vector<std::string> raw_titles() const;

    /// Lowercase word sequences of the cleaned titles, paired with their ids,
    /// for the mention matcher.
    struct TitleWords {
        std::vector<std::string> words;
        std::string statute_id;
    };
    const std::vector<TitleWords>& title_words() const { return title_words_; }
    /// Indices into title_words() of the titles whose first word is `word`.
    const std::vector<std::size_t>* titles_starting_with(const std::string& word) const;

  private:
    std::vector<StatuteTitle> titles_;
    std::map<std::string, std::string> title_index_;
    std::map<std::string, std::set<std::string>> acronym_index_;
    std::vector<TitleWords> title_words_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_first_word_;
};

/// Reads one raw title per line. An empty file yields an empty catalog.
StatuteCatalog load_statute_titles(const std::filesystem::path& path);

/// Truncates after the first whitespace token equal (ignoring case and
/// trailing punctuation) to "regulations", "order", "act" or "rules".
/// Titles without any of these are returned trimmed.
std::string clean_title(std::string_view raw_title);

/// First character of every token that starts with an uppercase letter.
/// Absent when fewer than two letters result.
std::optional<std::string> make_acronym(std::string_view cleaned_title);

/// Lowercase slug of a cleaned title: alphanumeric runs joined by '_'.
std::string statute_slug(std::string_view cleaned_title);

struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive

    bool operator==(const CharSpan&) const = default;
    auto operator<=>(const CharSpan&) const = default;
};

struct StatuteMention {
    std::string statute_id;
    CharSpan span;

    bool operator==(const StatuteMention&) const = default;
};

/// Case-insensitive whole-word title matches, longest match first and
/// non-overlapping, plus case-sensitive whole-word acronym matches (one
/// mention per statute sharing the acronym). Sorted by span, then id.
std::vector<StatuteMention> detect_statute_mentions(std::string_view text, const StatuteCatalog& catalog);

struct SectionMatch {
    std::string section;
    CharSpan span;

    bool operator==(const SectionMatch&) const = default;
};

/// Section numbers introduced by a cue word ("section", "sections", "s.",
/// "ss.", "subsection"). After a plural cue, numbers joined by ",", "and",
/// "or" or "&" are matched as well. Numbers without a cue are ignored.
/// Returned sections are lowercased.
std::vector<SectionMatch> detect_section_numbers(std::string_view text);

struct StatuteSectionRef {
    std::string statute_id;
    std::string section;

    bool operator==(const StatuteSectionRef&) const = default;
    auto operator<=>(const StatuteSectionRef&) const = default;

    /// Statute-field index term: lowercase "statute_id#section".
    std::string term() const;
};

struct PassageKey {
    std::string case_id;
    std::size_t passage_index = 0;

    bool operator==(const PassageKey&) const = default;
    auto operator<=>(const PassageKey&) const = default;
};

struct PassageAnnotations {
    /// One ref per distinct section in a passage, in order of first
    /// occurrence. Passages without sections have no entry.
    std::map<PassageKey, std::vector<StatuteSectionRef>> refs;
    /// Statute mentions per passage, spans relative to the passage text.
    std::map<PassageKey, std::vector<StatuteMention>> mentions;

    const std::vector<StatuteSectionRef>& refs_for(const PassageKey& key) const;
    bool empty() const { return refs.empty(); }
    void merge(PassageAnnotations&& other);

    bool operator==(const PassageAnnotations&) const = default;
};

/// Assigns each section number of the case to the statute it co-occurs with
/// in the most passages (ties: smallest statute_id; none: UNKNOWN) and tags
/// every passage containing the section.
PassageAnnotations map_sections_to_statutes(const Case& c, const StatuteCatalog& catalog);

/// Per-case annotation over the whole collection. The parallel path
/// distributes cases over OpenMP threads; both paths give equal results.
PassageAnnotations annotate_collection(const Collection& collection, const StatuteCatalog& catalog,
                                       Execution execution = Execution::parallel);

/// TSV case_id<TAB>passage_index<TAB>statute_id<TAB>section
void save_annotations(const PassageAnnotations& annotations, const std::filesystem::path& path);
PassageAnnotations load_annotations(const std::filesystem::path& path);

}  // namespace lexcourt
