#include "lexcourt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "lexcourt/error.hpp"
#include "lexcourt/statutes.hpp"

namespace lexcourt {

namespace {

struct CatalogEntry {
    const char* raw;
    const char* title;
    const char* acronym;
};

const CatalogEntry kCatalog[] = {
    {"Immigration and Refugee Protection Act (S.C. 2001, c. 27)", "Immigration and Refugee Protection Act", "IRPA"},
    {"Federal Courts Act (R.S.C., 1985, c. F-7)", "Federal Courts Act", "FCA"},
    {"Income Tax Act (R.S.C., 1985, c. 1 (5th Supp.))", "Income Tax Act", "ITA"},
    {"Citizenship Act (R.S.C., 1985, c. C-29)", "Citizenship Act", "CA"},
    {"Federal Courts Rules (SOR/98-106)", "Federal Courts Rules", "FCR"},
    {"Immigration and Refugee Protection Regulations (SOR/2002-227)", "Immigration and Refugee Protection Regulations",
     "IRPR"},
    {"Canada Evidence Act (R.S.C., 1985, c. C-5)", "Canada Evidence Act", "CEA"},
    {"Access to Information Act (R.S.C., 1985, c. A-1)", "Access to Information Act", "AIA"},
    {"Privacy Act (R.S.C., 1985, c. P-21)", "Privacy Act", "PA"},
    {"Fisheries Act (R.S.C., 1985, c. F-14)", "Fisheries Act", "FA"},
    {"Employment Insurance Act (S.C. 1996, c. 23)", "Employment Insurance Act", "EIA"},
    {"Official Languages Act (R.S.C., 1985, c. 31 (4th Supp.))", "Official Languages Act", "OLA"},
    {"Trade-marks Act (R.S.C., 1985, c. T-13) [Repealed]", "Trade-marks Act", "TA"},
};
constexpr std::size_t kCatalogSize = std::size(kCatalog);

const char* const kStopwords[] = {"the", "of", "and", "to", "in", "a", "that", "is", "by", "with"};
const char* const kPlaceholders[] = {"FRAGMENT_SUPPRESSED", "REFERENCE_SUPPRESSED", "CITATION_SUPPRESSED",
                                     "DATE_SUPPRESSED"};
constexpr char kConsonants[] = "bdfgklmnprstvz";
constexpr char kVowels[] = "aeiou";
constexpr std::size_t kSyllables = 14 * 5;
constexpr std::size_t kMaxVocab = kSyllables * kSyllables * kSyllables;

// Family sections and noise sections never overlap, so a noise citation in
// a case cannot pull a family section toward another statute.
constexpr int kFamilySectionMax = 250;
constexpr int kNoiseSectionMin = 300;
constexpr int kNoiseSectionMax = 699;

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    bool chance(double p) { return unit() < p; }
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

std::string make_word(std::size_t i) {
    // Spread consecutive ids over the syllable space.
    std::size_t code = (i * 7919 + 13) % kMaxVocab;
    std::string word;
    for (int s = 0; s < 3; ++s) {
        const auto syl = code % kSyllables;
        code /= kSyllables;
        word += kConsonants[syl / 5];
        word += kVowels[syl % 5];
    }
    return word;
}

struct Citation {
    std::size_t statute = 0;
    std::string section;
};

using WordSet = std::vector<std::size_t>;

struct Family {
    std::vector<WordSet> issues;
    std::vector<Citation> citations;
};

class Generator {
  public:
    explicit Generator(const SyntheticOptions& o) : opt_(o), rng_(o.seed) {
        vocab_.reserve(o.vocab_size);
        for (std::size_t i = 0; i < o.vocab_size; ++i) vocab_.push_back(make_word(i));
        zipf_cdf_.reserve(o.vocab_size);
        double total = 0.0;
        for (std::size_t i = 0; i < o.vocab_size; ++i) {
            total += 1.0 / static_cast<double>(i + 1);
            zipf_cdf_.push_back(total);
        }
        for (auto& c : zipf_cdf_) c /= total;
    }

    SyntheticCollection run();

  private:
    struct Mix {
        const WordSet* words = nullptr;
        double rate = 0.0;
    };
    struct Draft {
        std::vector<std::string> passages;
        std::vector<std::pair<std::size_t, std::vector<Citation>>> cited;  // passage slot -> citations
        std::vector<bool> family_slot;
    };

    std::size_t zipf() {
        const auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), rng_.unit());
        return std::min<std::size_t>(static_cast<std::size_t>(it - zipf_cdf_.begin()), vocab_.size() - 1);
    }
    WordSet issue_words();
    std::string section(int lo, int hi);
    std::string sentence(const Mix& mix);
    std::string passage(const Mix& mix, int min_sentences, int max_sentences);
    std::string citation_passage(const std::vector<Citation>& cites, const Mix& mix);

    void add(Draft& d, std::string text, bool family = false) {
        d.passages.push_back(std::move(text));
        d.family_slot.push_back(family);
    }
    void add_fillers(Draft& d, int lo, int hi, std::set<std::string>& used);
    std::string render(Draft& draft, std::vector<std::size_t>& order);

    SyntheticOptions opt_;
    Rng rng_;
    std::vector<std::string> vocab_;
    std::vector<double> zipf_cdf_;
};

// Issue vocabulary comes from the frequent band that filler text also
// draws on, so an issue is recognisable by local concentration rather than
// by rare words.
WordSet Generator::issue_words() {
    const auto v = vocab_.size();
    const auto lo = v / 200;
    const auto hi = std::max(lo + 8, v / 25);
    WordSet words;
    for (int i = 0; i < 8; ++i) words.push_back(lo + rng_.below(hi - lo));
    return words;
}

std::string Generator::section(int lo, int hi) {
    std::string s = std::to_string(rng_.between(lo, hi));
    const double shape = rng_.unit();
    if (shape < 0.1) {
        s += "." + std::to_string(rng_.between(1, 3));
    } else if (shape < 0.35) {
        s += "(" + std::to_string(rng_.between(1, 5)) + ")";
    }
    return s;
}

std::string Generator::sentence(const Mix& mix) {
    const auto len = static_cast<std::size_t>(rng_.between(8, 16));
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        std::string w;
        const double r = rng_.unit();
        if (r < 0.22) {
            w = kStopwords[rng_.below(std::size(kStopwords))];
        } else if (mix.words != nullptr && r < 0.22 + mix.rate) {
            w = vocab_[(*mix.words)[rng_.below(mix.words->size())]];
        } else {
            w = vocab_[zipf()];
        }
        if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        if (!out.empty()) out += ' ';
        out += w;
    }
    if (rng_.chance(0.08)) out += std::string(" ") + kPlaceholders[rng_.below(std::size(kPlaceholders))];
    return out + '.';
}

std::string Generator::passage(const Mix& mix, int min_sentences, int max_sentences) {
    std::string out;
    const int n = rng_.between(min_sentences, max_sentences);
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + sentence(mix);
    return out;
}

std::string Generator::citation_passage(const std::vector<Citation>& cites, const Mix& mix) {
    const auto name = [&](std::size_t statute, bool allow_acronym) {
        if (allow_acronym && rng_.chance(0.35)) return std::string(kCatalog[statute].acronym);
        return std::string("the ") + kCatalog[statute].title;
    };
    std::string out;
    if (cites.size() == 2 && cites[0].statute == cites[1].statute && rng_.chance(0.5)) {
        out = "The applicant invokes ss. " + cites[0].section + " and " + cites[1].section + " of " +
              name(cites[0].statute, true) + ".";
    } else {
        for (const auto& c : cites) {
            std::string s;
            switch (rng_.below(4)) {
                case 0: s = "The applicant relies on section " + c.section + " of " + name(c.statute, true) + "."; break;
                case 1: s = "Under s. " + c.section + " of " + name(c.statute, true) + " the decision must stand."; break;
                case 2: s = "Subsection " + c.section + " of " + name(c.statute, false) + " applies here."; break;
                default: {
                    auto n = name(c.statute, false);
                    n[0] = static_cast<char>(n[0] - 'a' + 'A');
                    s = n + " provides at section " + c.section + " what is required.";
                }
            }
            out += (out.empty() ? "" : " ") + s;
        }
    }
    return out + " " + sentence(mix);
}

void Generator::add_fillers(Draft& d, int lo, int hi, std::set<std::string>& used) {
    const double noise_rate = 0.12 * opt_.statute_density;
    const int n = rng_.between(lo, hi);
    for (int i = 0; i < n; ++i) {
        if (opt_.statute_density > 0.0 && rng_.chance(noise_rate)) {
            std::vector<Citation> cites(1);
            cites[0].statute = rng_.below(kCatalogSize);
            do {
                cites[0].section = section(kNoiseSectionMin, kNoiseSectionMax);
            } while (!used.insert(cites[0].section).second);
            d.cited.push_back({d.passages.size(), cites});
            add(d, citation_passage(cites, Mix{}));
        } else {
            add(d, passage(Mix{}, 2, 4));
        }
    }
}

std::string Generator::render(Draft& d, std::vector<std::size_t>& order) {
    // The opening passage stays first; the rest are shuffled.
    order.resize(d.passages.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> tail(order.begin() + 1, order.end());
    rng_.shuffle(tail);
    std::copy(tail.begin(), tail.end(), order.begin() + 1);

    const bool numbered = rng_.chance(0.5);
    std::string text;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        if (pos) text += numbered ? "\n" : "\n\n";
        if (numbered) text += "[" + std::to_string(pos + 1) + "] ";
        text += d.passages[order[pos]];
    }
    return text + "\n";
}

SyntheticCollection Generator::run() {
    const std::size_t n = opt_.n_cases;
    std::size_t q = opt_.query_count.value_or(std::max<std::size_t>(1, n / 5));
    q = std::min(q, n / 2);

    std::vector<Family> families(q);
    for (auto& fam : families) {
        const int issues = rng_.between(2, 3);
        for (int i = 0; i < issues; ++i) fam.issues.push_back(issue_words());
        if (opt_.statute_density > 0.0 && rng_.chance(opt_.statute_density)) {
            std::set<std::string> used;
            const std::size_t refs = rng_.chance(0.3) ? 2 : 1;
            const auto statute = rng_.below(kCatalogSize);
            for (std::size_t r = 0; r < refs; ++r) {
                Citation c;
                c.statute = (r == 0 || rng_.chance(0.5)) ? statute : rng_.below(kCatalogSize);
                do {
                    c.section = section(1, kFamilySectionMax);
                } while (!used.insert(c.section).second);
                fam.citations.push_back(c);
            }
        }
    }

    constexpr auto kNone = static_cast<std::size_t>(-1);
    struct Role {
        std::size_t family = kNone;
        bool query = false;
        std::size_t issue = 0;
    };
    std::vector<Role> roles;
    for (std::size_t f = 0; f < q; ++f) roles.push_back({f, true, 0});
    std::vector<std::size_t> notices(q, 0);
    const auto add_notice = [&](std::size_t f) {
        roles.push_back({f, false, notices[f] % families[f].issues.size()});
        ++notices[f];
    };
    for (std::size_t f = 0; f < q; ++f) add_notice(f);
    std::size_t spare = n - 2 * q;
    for (std::size_t f = 0; f < q && spare > 0; ++f) {
        const auto extra = std::min(spare, rng_.below(std::max<std::size_t>(1, opt_.max_notices)));
        for (std::size_t i = 0; i < extra; ++i) add_notice(f);
        spare -= extra;
    }
    while (roles.size() < n) roles.push_back({});

    std::vector<std::size_t> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i] = i;
    rng_.shuffle(slots);

    const auto width = std::max<std::size_t>(4, std::to_string(n).size());
    const auto case_name = [&](std::size_t i) {
        auto digits = std::to_string(i + 1);
        return "case_" + std::string(width - digits.size(), '0') + digits;
    };

    SyntheticCollection out;
    for (const auto& e : kCatalog) out.statute_titles.emplace_back(e.raw);
    std::vector<std::string> query_of_family(q);
    const double rate = 0.4;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& role = roles[slots[i]];
        const auto id = case_name(i);
        Draft d;
        std::set<std::string> used;
        add(d, passage(Mix{}, 2, 4));
        if (role.family == kNone) {
            // Background: either an unrelated issue or a copy of some family's
            // issue without its statute citation.
            WordSet own;
            const WordSet* words = &own;
            if (q > 0 && rng_.chance(0.3)) {
                const auto& fam = families[rng_.below(q)];
                const auto& src = fam.issues[rng_.below(fam.issues.size())];
                own = issue_words();
                const auto keep = src.size() * 3 / 4;
                for (std::size_t k = 0; k < keep; ++k) own[k] = src[k];
            } else {
                own = issue_words();
            }
            const int n_issue = rng_.between(1, 2);
            for (int k = 0; k < n_issue; ++k) add(d, passage(Mix{words, rate}, 2, 3));
            add_fillers(d, 2, 8, used);
        } else {
            const auto& fam = families[role.family];
            for (const auto& c : fam.citations) used.insert(c.section);
            if (role.query) {
                query_of_family[role.family] = id;
                for (const auto& issue : fam.issues) {
                    const int n_issue = rng_.between(1, 2);
                    for (int k = 0; k < n_issue; ++k) add(d, passage(Mix{&issue, rate}, 2, 3));
                }
            } else {
                const int n_issue = rng_.between(1, 2);
                for (int k = 0; k < n_issue; ++k) add(d, passage(Mix{&fam.issues[role.issue], rate}, 2, 3));
            }
            if (!fam.citations.empty()) {
                d.cited.push_back({d.passages.size(), fam.citations});
                add(d, citation_passage(fam.citations, Mix{&fam.issues[role.issue], rate}), true);
            }
            if (role.query) {
                add_fillers(d, 2, 6, used);
            } else {
                add_fillers(d, 3, 10, used);
            }
        }

        std::vector<std::size_t> order;
        auto text = render(d, order);
        std::vector<std::size_t> position(order.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) position[order[pos]] = pos;
        for (const auto& [slot, cites] : d.cited) {
            for (const auto& c : cites) {
                out.plants.push_back({id, position[slot], statute_slug(clean_title(kCatalog[c.statute].raw)),
                                      c.section, d.family_slot[slot]});
            }
        }
        out.collection.cases.emplace(id, make_case(id, std::move(text), role.query));
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& role = roles[slots[i]];
        if (role.family == kNone || role.query) continue;
        out.collection.qrels[query_of_family[role.family]].insert(case_name(i));
    }
    for (const auto& [qid, rel] : out.collection.qrels) out.collection.query_order.push_back(qid);
    std::sort(out.plants.begin(), out.plants.end(), [](const PlantedCitation& a, const PlantedCitation& b) {
        return std::tie(a.case_id, a.passage_index, a.section) < std::tie(b.case_id, b.passage_index, b.section);
    });
    return out;
}

}  // namespace

SyntheticCollection generate_synthetic_collection(const SyntheticOptions& options) {
    if (options.n_cases < 2) throw ArgumentError("n_cases must be >= 2");
    if (options.vocab_size < 50 || options.vocab_size > kMaxVocab) {
        throw ArgumentError("vocab_size must lie in [50, " + std::to_string(kMaxVocab) + "]");
    }
    if (!(options.statute_density >= 0.0 && options.statute_density <= 1.0)) {
        throw ArgumentError("statute_density must lie in [0, 1]");
    }
    if (options.query_count && *options.query_count < 1) throw ArgumentError("query_count must be >= 1");
    return Generator(options).run();
}

SyntheticCollection generate_synthetic_collection(std::uint64_t seed, std::size_t n_cases, std::size_t vocab_size,
                                                  double statute_density) {
    SyntheticOptions options;
    options.seed = seed;
    options.n_cases = n_cases;
    options.vocab_size = vocab_size;
    options.statute_density = statute_density;
    return generate_synthetic_collection(options);
}

}  // namespace lexcourt
