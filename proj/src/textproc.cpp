#include "lexcourt/textproc.hpp"

#include <fstream>

#include "lexcourt/error.hpp"

namespace lexcourt {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_alnum(char c) { return is_ascii_digit(c) || is_ascii_alpha(c); }

struct CodePoint {
    char32_t value;
    std::size_t length;  // 0 for an invalid sequence
};

CodePoint decode_utf8(std::string_view text, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead < 0x80) return {lead, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        return {0, 0};
    }
    if (pos + len > text.size()) return {0, 0};
    for (std::size_t i = 1; i < len; ++i) {
        const auto cont = static_cast<unsigned char>(text[pos + i]);
        if ((cont & 0xC0) != 0x80) return {0, 0};
        cp = (cp << 6) | (cont & 0x3F);
    }
    return {cp, len};
}

// Non-ASCII code points count as letters except the common punctuation and
// symbol blocks.
bool is_word_code_point(char32_t cp) {
    if (cp < 0x80) return is_ascii_alnum(static_cast<char>(cp));
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xFE10 && cp <= 0xFE6F) return false;
    if (cp >= 0xFF00 && cp <= 0xFF20) return false;
    if (cp == 0xFEFF) return false;
    return true;
}

// Length of the word character at pos, 0 if pos holds a separator.
std::size_t word_char_at(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    const auto cp = decode_utf8(text, pos);
    if (cp.length == 0 || !is_word_code_point(cp.value)) return 0;
    return cp.length;
}

// End of the longest citation-grammar match starting at pos, or pos when
// text[pos] is not a digit.
std::size_t match_citation(std::string_view text, std::size_t pos) {
    std::size_t i = pos;
    while (i < text.size() && is_ascii_digit(text[i])) ++i;
    if (i == pos) return pos;
    if (i + 1 < text.size() && text[i] == '.' && is_ascii_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_ascii_digit(text[i])) ++i;
    }
    while (i < text.size() && text[i] == '(') {
        std::size_t j = i + 1;
        if (j < text.size() && is_ascii_digit(text[j])) {
            while (j < text.size() && is_ascii_digit(text[j])) ++j;
        } else {
            while (j < text.size() && is_ascii_alpha(text[j])) ++j;
        }
        if (j == i + 1 || j >= text.size() || text[j] != ')') break;
        i = j + 1;
    }
    return i;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (const char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::vector<std::string> split_on_underscore(const std::string& token) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= token.size()) {
        const auto end = token.find('_', start);
        const auto stop = end == std::string::npos ? token.size() : end;
        if (stop > start) parts.push_back(token.substr(start, stop - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return parts;
}

}  // namespace

const std::vector<std::string>& default_stopwords() {
    static const std::vector<std::string> words = {
        "a",    "an",   "and",  "are",   "as",   "at",    "be",    "but",  "by",   "for",  "if",
        "in",   "into", "is",   "it",    "no",   "not",   "of",    "on",   "or",   "such", "that",
        "the",  "their", "then", "there", "these", "they", "this", "to",   "was",  "will", "with"};
    return words;
}

const std::vector<std::string>& default_placeholders() {
    static const std::vector<std::string> tokens = {"FRAGMENT_SUPPRESSED", "REFERENCE_SUPPRESSED",
                                                    "CITATION_SUPPRESSED", "DATE_SUPPRESSED"};
    return tokens;
}

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig config;
    config.stopwords.insert(default_stopwords().begin(), default_stopwords().end());
    for (const auto& p : default_placeholders()) config.placeholders.insert(to_lower(p));
    return config;
}

void PipelineConfig::validate() const {
    if (min_token_len < 1) throw ArgumentError("min_token_len must be >= 1");
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read word list: " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        words.push_back(line.substr(first, last - first + 1));
    }
    return words;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto width = word_char_at(text, pos);
        if (width == 0) {
            const auto cp = decode_utf8(text, pos);
            pos += cp.length == 0 ? 1 : cp.length;
            continue;
        }
        if (is_ascii_digit(text[pos])) {
            const auto end = match_citation(text, pos);
            std::size_t digits_end = pos;
            while (digits_end < text.size() && is_ascii_digit(text[digits_end])) ++digits_end;
            if (end > digits_end && word_char_at(text, end) == 0 && (end >= text.size() || text[end] != '_')) {
                tokens.emplace_back(text.substr(pos, end - pos));
                pos = end;
                continue;
            }
        }
        // Plain run. '_' joins runs so that placeholder tokens such as
        // FRAGMENT_SUPPRESSED stay whole.
        const auto start = pos;
        while (pos < text.size()) {
            const auto w = word_char_at(text, pos);
            if (w > 0) {
                pos += w;
            } else if (text[pos] == '_' && word_char_at(text, pos + 1) > 0) {
                ++pos;
            } else {
                break;
            }
        }
        tokens.emplace_back(text.substr(start, pos - start));
    }
    return tokens;
}

bool is_section_citation_token(std::string_view token) {
    if (token.empty() || !is_ascii_digit(token.front())) return false;
    return match_citation(token, 0) == token.size();
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto c = static_cast<unsigned char>(out[i]);
        if (c >= 'A' && c <= 'Z') {
            out[i] = static_cast<char>(c + 32);
        } else if (c == 0xC3 && i + 1 < out.size()) {
            // U+00C0..U+00DE except the multiplication sign
            const auto next = static_cast<unsigned char>(out[i + 1]);
            if (next >= 0x80 && next <= 0x9E && next != 0x97) out[i + 1] = static_cast<char>(next + 0x20);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens, const PipelineConfig& config,
                                   const std::unordered_set<std::string>* citations) {
    std::vector<std::string> terms;
    terms.reserve(tokens.size());
    const auto min_len = static_cast<std::size_t>(config.min_token_len);

    auto process = [&](std::string lowered) {
        if (config.stopwords.contains(lowered)) return;
        const bool numeric = is_section_citation_token(lowered);
        if (numeric) {
            if (citations != nullptr && !citations->contains(lowered)) return;
            terms.push_back(std::move(lowered));
            return;
        }
        if (utf8_length(lowered) < min_len) return;
        if (config.stemmer == Stemmer::porter) {
            auto stem = porter_stem(lowered);
            if (utf8_length(stem) < min_len) return;
            terms.push_back(std::move(stem));
        } else {
            terms.push_back(std::move(lowered));
        }
    };

    for (const auto& token : tokens) {
        auto lowered = to_lower(token);
        if (config.placeholders.contains(lowered)) continue;
        if (lowered.find('_') != std::string::npos) {
            for (auto& part : split_on_underscore(lowered)) process(std::move(part));
        } else {
            process(std::move(lowered));
        }
    }
    return terms;
}

}  // namespace lexcourt
