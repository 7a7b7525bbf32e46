#include "lexcourt/statutes.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <unordered_map>

#include "lexcourt/error.hpp"
#include "lexcourt/textproc.hpp"

namespace fs = std::filesystem;

namespace lexcourt {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_word_byte(char c) { return is_ascii_digit(c) || is_ascii_alpha(c) || static_cast<unsigned char>(c) >= 0x80; }
char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const auto start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::string_view strip_punctuation(std::string_view token) {
    std::size_t first = 0;
    while (first < token.size() && !is_word_byte(token[first])) ++first;
    std::size_t last = token.size();
    while (last > first && !is_word_byte(token[last - 1])) --last;
    return token.substr(first, last - first);
}

struct Word {
    std::size_t begin;
    std::size_t end;
};

std::vector<Word> word_spans(std::string_view text) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(text[i])) {
            ++i;
            continue;
        }
        const auto start = i;
        while (i < text.size() && is_word_byte(text[i])) ++i;
        words.push_back({start, i});
    }
    return words;
}

std::vector<std::string> lowercase_words(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& w : word_spans(text)) out.push_back(to_lower(text.substr(w.begin, w.end - w.begin)));
    return out;
}

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view cue) {
    if (pos + cue.size() > text.size()) return false;
    for (std::size_t i = 0; i < cue.size(); ++i) {
        if (ascii_lower(text[pos + i]) != cue[i]) return false;
    }
    return true;
}

// Citation grammar match starting at pos; returns end or pos on failure.
std::size_t match_section(std::string_view text, std::size_t pos) {
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
    // A number glued to letters ("96a") is not a section.
    if (i < text.size() && is_word_byte(text[i])) return pos;
    return i;
}

std::size_t skip_spaces(std::string_view text, std::size_t pos) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) {
        ++pos;
    }
    return pos;
}

struct Cue {
    std::string_view text;
    bool plural;
    bool ends_with_period;
};

// Longest first so "sections" wins over "section" and "ss." over "s.".
constexpr std::array<Cue, 6> kCues = {{{"subsections", true, false},
                                       {"subsection", false, false},
                                       {"sections", true, false},
                                       {"section", false, false},
                                       {"ss.", true, true},
                                       {"s.", false, true}}};

// Matches a conjunction between two section numbers and returns the
// position after it, or npos.
std::size_t match_conjunction(std::string_view text, std::size_t pos) {
    std::size_t i = skip_spaces(text, pos);
    bool seen = false;
    if (i < text.size() && (text[i] == ',' || text[i] == '&')) {
        ++i;
        seen = true;
        i = skip_spaces(text, i);
    }
    for (const std::string_view word : {"and", "or"}) {
        if (iequals_prefix(text, i, word) && i + word.size() < text.size() && !is_word_byte(text[i + word.size()])) {
            i += word.size();
            seen = true;
            break;
        }
    }
    if (!seen) return std::string_view::npos;
    return skip_spaces(text, i);
}

}  // namespace

std::string clean_title(std::string_view raw_title) {
    static constexpr std::array<std::string_view, 4> kKeywords = {"regulations", "order", "act", "rules"};
    const auto tokens = split_whitespace(raw_title);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto core = to_lower(strip_punctuation(tokens[i]));
        if (std::find(kKeywords.begin(), kKeywords.end(), core) == kKeywords.end()) continue;
        std::string out;
        for (std::size_t t = 0; t < i; ++t) {
            out += tokens[t];
            out += ' ';
        }
        // Keep leading characters, drop trailing punctuation of the keyword.
        auto keyword = tokens[i];
        while (!keyword.empty() && !is_word_byte(keyword.back())) keyword.remove_suffix(1);
        out += keyword;
        return out;
    }
    const auto first = raw_title.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = raw_title.find_last_not_of(" \t\r\n");
    return std::string(raw_title.substr(first, last - first + 1));
}

std::optional<std::string> make_acronym(std::string_view cleaned_title) {
    std::string acronym;
    for (const auto token : split_whitespace(cleaned_title)) {
        if (token.front() >= 'A' && token.front() <= 'Z') acronym += token.front();
    }
    if (acronym.size() < 2) return std::nullopt;
    return acronym;
}

std::string statute_slug(std::string_view cleaned_title) {
    std::string slug;
    for (const auto& word : lowercase_words(cleaned_title)) {
        if (!slug.empty()) slug += '_';
        slug += word;
    }
    return slug;
}

StatuteCatalog StatuteCatalog::from_titles(const std::vector<std::string>& raw_titles) {
    StatuteCatalog catalog;
    for (const auto& raw : raw_titles) {
        auto cleaned = clean_title(raw);
        auto id = statute_slug(cleaned);
        if (id.empty() || catalog.by_id_.contains(id)) continue;
        StatuteTitle title{id, raw, cleaned, make_acronym(cleaned)};
        catalog.by_id_.emplace(id, catalog.titles_.size());
        catalog.title_index_.emplace(to_lower(cleaned), id);
        if (title.acronym) catalog.acronym_index_[*title.acronym].insert(id);
        auto words = lowercase_words(cleaned);
        catalog.by_first_word_[words.front()].push_back(catalog.title_words_.size());
        catalog.title_words_.push_back({std::move(words), id});
        catalog.titles_.push_back(std::move(title));
    }
    return catalog;
}

const StatuteTitle* StatuteCatalog::find(std::string_view statute_id) const {
    const auto it = by_id_.find(statute_id);
    return it == by_id_.end() ? nullptr : &titles_[it->second];
}

const std::vector<std::size_t>* StatuteCatalog::titles_starting_with(const std::string& word) const {
    const auto it = by_first_word_.find(word);
    return it == by_first_word_.end() ? nullptr : &it->second;
}

std::vector<std::string> StatuteCatalog::raw_titles() const {
    std::vector<std::string> out;
    out.reserve(titles_.size());
    for (const auto& t : titles_) out.push_back(t.raw_title);
    return out;
}

StatuteCatalog load_statute_titles(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read statute titles: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return StatuteCatalog::from_titles(lines);
}

std::vector<StatuteMention> detect_statute_mentions(std::string_view text, const StatuteCatalog& catalog) {
    const auto words = word_spans(text);
    std::vector<std::string> lowered;
    lowered.reserve(words.size());
    for (const auto& w : words) lowered.push_back(to_lower(text.substr(w.begin, w.end - w.begin)));

    struct Candidate {
        CharSpan span;
        const std::string* id;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto* bucket = catalog.titles_starting_with(lowered[i]);
        if (bucket == nullptr) continue;
        for (const auto idx : *bucket) {
            const auto* tw = &catalog.title_words()[idx];
            const auto n = tw->words.size();
            if (i + n > words.size()) continue;
            bool match = true;
            for (std::size_t k = 1; k < n && match; ++k) match = lowered[i + k] == tw->words[k];
            if (match) candidates.push_back({{words[i].begin, words[i + n - 1].end}, &tw->statute_id});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        const auto la = a.span.end - a.span.begin;
        const auto lb = b.span.end - b.span.begin;
        if (la != lb) return la > lb;
        if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
        return *a.id < *b.id;
    });

    std::vector<StatuteMention> mentions;
    std::vector<CharSpan> taken;
    auto overlaps = [&](const CharSpan& s) {
        return std::any_of(taken.begin(), taken.end(),
                           [&](const CharSpan& t) { return s.begin < t.end && t.begin < s.end; });
    };
    for (const auto& c : candidates) {
        if (overlaps(c.span)) continue;
        taken.push_back(c.span);
        mentions.push_back({*c.id, c.span});
    }

    const auto& acronyms = catalog.acronym_index();
    if (!acronyms.empty()) {
        for (const auto& w : words) {
            const auto word = text.substr(w.begin, w.end - w.begin);
            const auto it = acronyms.find(std::string(word));
            if (it == acronyms.end()) continue;
            const CharSpan span{w.begin, w.end};
            if (overlaps(span)) continue;
            for (const auto& id : it->second) mentions.push_back({id, span});
        }
    }

    std::sort(mentions.begin(), mentions.end(), [](const StatuteMention& a, const StatuteMention& b) {
        if (a.span != b.span) return a.span < b.span;
        return a.statute_id < b.statute_id;
    });
    return mentions;
}

std::vector<SectionMatch> detect_section_numbers(std::string_view text) {
    std::vector<SectionMatch> matches;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const bool word_start = is_ascii_alpha(text[pos]) && (pos == 0 || !is_word_byte(text[pos - 1]));
        if (!word_start) {
            ++pos;
            continue;
        }
        const Cue* cue = nullptr;
        for (const auto& candidate : kCues) {
            if (!iequals_prefix(text, pos, candidate.text)) continue;
            const auto after = pos + candidate.text.size();
            if (!candidate.ends_with_period && after < text.size() && is_word_byte(text[after])) continue;
            cue = &candidate;
            break;
        }
        if (cue == nullptr) {
            while (pos < text.size() && is_word_byte(text[pos])) ++pos;
            continue;
        }
        std::size_t i = skip_spaces(text, pos + cue->text.size());
        auto end = match_section(text, i);
        if (end == i) {
            pos += cue->text.size();
            continue;
        }
        matches.push_back({to_lower(text.substr(i, end - i)), {i, end}});
        if (cue->plural) {
            while (true) {
                const auto next = match_conjunction(text, end);
                if (next == std::string_view::npos) break;
                const auto next_end = match_section(text, next);
                if (next_end == next) break;
                matches.push_back({to_lower(text.substr(next, next_end - next)), {next, next_end}});
                end = next_end;
            }
        }
        pos = end;
    }
    return matches;
}

std::string StatuteSectionRef::term() const { return to_lower(statute_id) + "#" + section; }

const std::vector<StatuteSectionRef>& PassageAnnotations::refs_for(const PassageKey& key) const {
    static const std::vector<StatuteSectionRef> kEmpty;
    const auto it = refs.find(key);
    return it == refs.end() ? kEmpty : it->second;
}

void PassageAnnotations::merge(PassageAnnotations&& other) {
    for (auto& [key, r] : other.refs) refs[key] = std::move(r);
    for (auto& [key, m] : other.mentions) mentions[key] = std::move(m);
}

PassageAnnotations map_sections_to_statutes(const Case& c, const StatuteCatalog& catalog) {
    PassageAnnotations out;
    std::vector<std::vector<std::string>> passage_sections(c.passages.size());
    std::vector<std::set<std::string>> passage_statutes(c.passages.size());
    // section -> statute -> number of passages where both occur
    std::map<std::string, std::map<std::string, std::size_t>> cooccurrence;

    for (std::size_t p = 0; p < c.passages.size(); ++p) {
        const auto& text = c.passages[p].text;
        auto mentions = detect_statute_mentions(text, catalog);
        for (const auto& m : mentions) passage_statutes[p].insert(m.statute_id);
        if (!mentions.empty()) out.mentions[{c.case_id, p}] = std::move(mentions);

        for (auto& match : detect_section_numbers(text)) {
            auto& sections = passage_sections[p];
            if (std::find(sections.begin(), sections.end(), match.section) == sections.end()) {
                sections.push_back(std::move(match.section));
            }
        }
        for (const auto& s : passage_sections[p]) {
            auto& counts = cooccurrence[s];
            for (const auto& id : passage_statutes[p]) ++counts[id];
        }
    }

    std::map<std::string, std::string> assigned;
    for (const auto& [section, counts] : cooccurrence) {
        std::string best(kUnknownStatute);
        std::size_t best_count = 0;
        // std::map iterates ids ascending, so strict > keeps the smallest id on ties.
        for (const auto& [id, count] : counts) {
            if (count > best_count) {
                best = id;
                best_count = count;
            }
        }
        assigned.emplace(section, std::move(best));
    }

    for (std::size_t p = 0; p < c.passages.size(); ++p) {
        if (passage_sections[p].empty()) continue;
        auto& refs = out.refs[{c.case_id, p}];
        for (const auto& s : passage_sections[p]) refs.push_back({assigned.at(s), s});
    }
    return out;
}

PassageAnnotations annotate_collection(const Collection& collection, const StatuteCatalog& catalog,
                                       Execution execution) {
    std::vector<const Case*> cases;
    cases.reserve(collection.cases.size());
    for (const auto& [id, c] : collection.cases) cases.push_back(&c);

    std::vector<PassageAnnotations> per_case(cases.size());
    for_each_index(static_cast<std::ptrdiff_t>(cases.size()), execution,
                   [&](std::ptrdiff_t i) { per_case[i] = map_sections_to_statutes(*cases[i], catalog); });

    PassageAnnotations all;
    for (auto& a : per_case) all.merge(std::move(a));
    return all;
}

void save_annotations(const PassageAnnotations& annotations, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write annotations: " + path.string());
    for (const auto& [key, refs] : annotations.refs) {
        for (const auto& r : refs) {
            out << key.case_id << '\t' << key.passage_index << '\t' << r.statute_id << '\t' << r.section << '\n';
        }
    }
}

PassageAnnotations load_annotations(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read annotations: " + path.string());
    PassageAnnotations annotations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::array<std::string, 4> cols;
        std::size_t start = 0;
        for (std::size_t c = 0; c < 4; ++c) {
            const auto tab = line.find('\t', start);
            if ((tab == std::string::npos) != (c == 3)) {
                throw ValidationError("annotations line " + std::to_string(line_no) + ": expected 4 columns");
            }
            cols[c] = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
            start = tab + 1;
        }
        std::size_t index = 0;
        try {
            index = std::stoul(cols[1]);
        } catch (const std::exception&) {
            throw ValidationError("annotations line " + std::to_string(line_no) + ": bad passage index");
        }
        annotations.refs[{cols[0], index}].push_back({cols[2], cols[3]});
    }
    return annotations;
}

}  // namespace lexcourt
