#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace lexcourt {

enum class Stemmer { porter, none };

/// Settings of the analysis chain shared by indexing and query construction.
struct PipelineConfig {
    std::unordered_set<std::string> stopwords;
    /// Stored lowercase; matching is case-insensitive.
    std::unordered_set<std::string> placeholders;
    int min_token_len = 3;
    Stemmer stemmer = Stemmer::porter;

    /// 33-word English stop set, default placeholder inventory, Porter, length 3.
    static PipelineConfig defaults();

    void validate() const;
};

const std::vector<std::string>& default_stopwords();
const std::vector<std::string>& default_placeholders();

/// Reads a one-token-per-line list. Blank lines and '#' comments are skipped.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

/// Splits text into raw tokens. A token is a maximal run of letters and
/// digits; a run that starts with a digit may extend through section-citation
/// punctuation ("18.1(4)", "5(1)(a)") when the whole run fits the citation
/// grammar. Every other character is a separator.
std::vector<std::string> tokenize(std::string_view text);

/// digits ["." digits] { "(" (digits | letters) ")" }
bool is_section_citation_token(std::string_view token);

/// Lowercases ASCII and Latin-1 uppercase letters; other bytes are copied.
std::string to_lower(std::string_view text);

/// Porter (1980) stemmer, reference-implementation variant. Input must be
/// lowercase ASCII; anything else is returned unchanged.
std::string porter_stem(std::string_view word);

/// Applies, in order: placeholder removal, lowercasing, stopword removal,
/// length filter, number filter, stemming.
///
/// Numeric tokens (all digits, or anything matching the citation grammar)
/// survive the length filter. Without `citations` every token passing
/// is_section_citation_token is kept; with it, a numeric token is kept only
/// if it is in the set, which lets the caller restrict numbers to the
/// sections detected in the surrounding text. Citation tokens are never
/// stemmed. Stems shorter than min_token_len are dropped.
std::vector<std::string> normalize(const std::vector<std::string>& tokens, const PipelineConfig& config,
                                   const std::unordered_set<std::string>* citations = nullptr);

}  // namespace lexcourt
