// Porter stemmer following the structure of Martin Porter's ANSI C reference
// implementation, including its two departures from the 1980 article
// ("bli" -> "ble" and "logi" -> "log" in step 2). This is the variant most
// search engines ship as their "porter" stemmer.

#include <string>
#include <string_view>

#include "lexcourt/textproc.hpp"

namespace lexcourt {

namespace {

class PorterStemmer {
  public:
    explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

  private:
    std::string b_;
    int k_;
    int j_ = 0;

    char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

    bool cons(int i) const {
        switch (at(i)) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_consonant(int j) const {
        if (j < 1) return false;
        if (at(j) != at(j - 1)) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = at(i);
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int length = static_cast<int>(s.size());
        if (length > k_ + 1) return false;
        if (at(k_) != s.back()) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - length + 1), s.size()) != s) return false;
        j_ = k_ - length;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measure(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (at(k_) == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (at(k_ - 1) != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = at(k_);
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (j_ = k_, m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    template <std::size_t N>
    void apply_first(const Rule (&rules)[N]) {
        for (const auto& rule : rules) {
            if (ends(rule.suffix)) {
                replace_if_measure(rule.replacement);
                return;
            }
        }
    }

    void step2() {
        if (k_ < 1) return;
        switch (at(k_ - 1)) {
            case 'a': {
                static const Rule rules[] = {{"ational", "ate"}, {"tional", "tion"}};
                apply_first(rules);
                break;
            }
            case 'c': {
                static const Rule rules[] = {{"enci", "ence"}, {"anci", "ance"}};
                apply_first(rules);
                break;
            }
            case 'e': {
                static const Rule rules[] = {{"izer", "ize"}};
                apply_first(rules);
                break;
            }
            case 'l': {
                static const Rule rules[] = {
                    {"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
                apply_first(rules);
                break;
            }
            case 'o': {
                static const Rule rules[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
                apply_first(rules);
                break;
            }
            case 's': {
                static const Rule rules[] = {
                    {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
                apply_first(rules);
                break;
            }
            case 't': {
                static const Rule rules[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
                apply_first(rules);
                break;
            }
            case 'g': {
                static const Rule rules[] = {{"logi", "log"}};
                apply_first(rules);
                break;
            }
            default:
                break;
        }
    }

    void step3() {
        switch (at(k_)) {
            case 'e': {
                static const Rule rules[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
                apply_first(rules);
                break;
            }
            case 'i': {
                static const Rule rules[] = {{"iciti", "ic"}};
                apply_first(rules);
                break;
            }
            case 'l': {
                static const Rule rules[] = {{"ical", "ic"}, {"ful", ""}};
                apply_first(rules);
                break;
            }
            case 's': {
                static const Rule rules[] = {{"ness", ""}};
                apply_first(rules);
                break;
            }
            default:
                break;
        }
    }

    bool ends_any(std::initializer_list<std::string_view> suffixes) {
        for (const auto s : suffixes) {
            if (ends(s)) return true;
        }
        return false;
    }

    void step4() {
        if (k_ < 1) return;
        bool matched = false;
        switch (at(k_ - 1)) {
            case 'a':
                matched = ends("al");
                break;
            case 'c':
                matched = ends_any({"ance", "ence"});
                break;
            case 'e':
                matched = ends("er");
                break;
            case 'i':
                matched = ends("ic");
                break;
            case 'l':
                matched = ends_any({"able", "ible"});
                break;
            case 'n':
                matched = ends_any({"ant", "ement", "ment", "ent"});
                break;
            case 'o':
                if (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) {
                    matched = true;
                } else {
                    matched = ends("ou");
                }
                break;
            case 's':
                matched = ends("ism");
                break;
            case 't':
                matched = ends_any({"ate", "iti"});
                break;
            case 'u':
                matched = ends("ous");
                break;
            case 'v':
                matched = ends("ive");
                break;
            case 'z':
                matched = ends("ize");
                break;
            default:
                break;
        }
        if (matched && m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (at(k_) == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (at(k_) == 'l' && double_consonant(k_) && m() > 1) --k_;
    }
};

bool is_lower_ascii_word(std::string_view word) {
    for (const char c : word) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

}  // namespace

std::string porter_stem(std::string_view word) {
    if (!is_lower_ascii_word(word)) return std::string(word);
    return PorterStemmer(word).run();
}

}  // namespace lexcourt
