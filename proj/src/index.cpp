#include "lexcourt/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lexcourt/error.hpp"

namespace fs = std::filesystem;

namespace lexcourt {

std::string_view to_string(Granularity g) { return g == Granularity::document ? "document" : "passage"; }

Granularity parse_granularity(std::string_view name) {
    if (name == "document" || name == "doc") return Granularity::document;
    if (name == "passage") return Granularity::passage;
    throw ArgumentError("unknown granularity: " + std::string(name));
}

Field parse_field(std::string_view name) {
    if (name == "body") return Field::body;
    if (name == "statute") return Field::statute;
    throw ArgumentError("unknown field: " + std::string(name));
}

double FieldIndex::average_length() const {
    if (unit_lengths_.empty()) return 0.0;
    return static_cast<double>(total_terms_) / static_cast<double>(unit_lengths_.size());
}

std::optional<std::size_t> FieldIndex::term_id(std::string_view term) const {
    const auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                     [](const std::string& a, std::string_view b) { return a < b; });
    if (it == terms_.end() || *it != term) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin());
}

std::span<const Posting> FieldIndex::postings(std::string_view term) const {
    const auto id = term_id(term);
    if (!id) return {};
    return postings_[*id];
}

std::uint64_t FieldIndex::ctf(std::string_view term) const {
    const auto id = term_id(term);
    return id ? ctf_[*id] : 0;
}

FieldIndex FieldIndex::build(const std::vector<std::vector<std::string>>& unit_terms) {
    std::unordered_map<std::string, std::vector<Posting>> accumulated;
    FieldIndex field;
    field.unit_lengths_.reserve(unit_terms.size());
    std::unordered_map<std::string_view, std::uint32_t> counts;
    for (std::size_t u = 0; u < unit_terms.size(); ++u) {
        counts.clear();
        for (const auto& t : unit_terms[u]) ++counts[t];
        for (const auto& [term, tf] : counts) {
            accumulated[std::string(term)].push_back({static_cast<UnitId>(u), tf});
        }
        field.unit_lengths_.push_back(static_cast<std::uint32_t>(unit_terms[u].size()));
        field.total_terms_ += unit_terms[u].size();
    }

    field.terms_.reserve(accumulated.size());
    for (const auto& [term, plist] : accumulated) field.terms_.push_back(term);
    std::sort(field.terms_.begin(), field.terms_.end());
    field.postings_.reserve(field.terms_.size());
    field.ctf_.reserve(field.terms_.size());
    for (const auto& term : field.terms_) {
        auto& plist = accumulated.at(term);
        std::uint64_t ctf = 0;
        for (const auto& p : plist) ctf += p.tf;
        field.ctf_.push_back(ctf);
        field.postings_.push_back(std::move(plist));
    }
    return field;
}

std::vector<std::string> analyze_passage_text(std::string_view text, const PipelineConfig& pipeline) {
    std::unordered_set<std::string> citations;
    for (auto& m : detect_section_numbers(text)) citations.insert(std::move(m.section));
    return normalize(tokenize(text), pipeline, &citations);
}

std::vector<std::string> statute_terms(const std::vector<StatuteSectionRef>& refs) {
    std::vector<std::string> terms;
    for (const auto& r : refs) {
        auto t = r.term();
        if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(std::move(t));
    }
    return terms;
}

Index Index::build(const Collection& collection, const PassageAnnotations* annotations,
                   const IndexBuildOptions& options) {
    if (collection.cases.empty()) throw ValidationError("cannot index an empty collection");
    options.pipeline.validate();

    std::vector<const Passage*> passages;
    for (const auto& [id, c] : collection.cases) {
        for (const auto& p : c.passages) passages.push_back(&p);
    }

    std::vector<std::vector<std::string>> passage_terms(passages.size());
    for_each_index(static_cast<std::ptrdiff_t>(passages.size()), options.execution, [&](std::ptrdiff_t i) {
        passage_terms[i] = analyze_passage_text(passages[i]->text, options.pipeline);
    });

    Index index;
    index.granularity_ = options.granularity;
    index.pipeline_ = options.pipeline;
    index.catalog_ = options.catalog;

    std::vector<std::vector<std::string>> body_terms;
    std::vector<std::vector<std::string>> statute_field_terms;
    std::size_t next_passage = 0;
    for (const auto& [id, c] : collection.cases) {
        if (options.granularity == Granularity::passage) {
            for (const auto& p : c.passages) {
                RetrievalUnit unit;
                unit.unit_id = static_cast<UnitId>(index.units_.size());
                unit.case_id = id;
                unit.passage_index = static_cast<std::uint32_t>(p.passage_index);
                body_terms.push_back(std::move(passage_terms[next_passage++]));
                statute_field_terms.push_back(
                    annotations ? statute_terms(annotations->refs_for({id, p.passage_index}))
                                : std::vector<std::string>{});
                unit.body_length = static_cast<std::uint32_t>(body_terms.back().size());
                unit.statute_length = static_cast<std::uint32_t>(statute_field_terms.back().size());
                index.units_.push_back(std::move(unit));
            }
        } else {
            RetrievalUnit unit;
            unit.unit_id = static_cast<UnitId>(index.units_.size());
            unit.case_id = id;
            std::vector<std::string> body;
            std::vector<StatuteSectionRef> refs;
            for (const auto& p : c.passages) {
                auto& terms = passage_terms[next_passage++];
                body.insert(body.end(), std::make_move_iterator(terms.begin()), std::make_move_iterator(terms.end()));
                if (annotations) {
                    const auto& r = annotations->refs_for({id, p.passage_index});
                    refs.insert(refs.end(), r.begin(), r.end());
                }
            }
            unit.body_length = static_cast<std::uint32_t>(body.size());
            body_terms.push_back(std::move(body));
            statute_field_terms.push_back(statute_terms(refs));
            unit.statute_length = static_cast<std::uint32_t>(statute_field_terms.back().size());
            index.units_.push_back(std::move(unit));
        }
    }

    index.body_ = FieldIndex::build(body_terms);
    index.statute_ = FieldIndex::build(statute_field_terms);
    index.rebuild_case_map();
    return index;
}

void Index::rebuild_case_map() {
    case_units_.clear();
    for (const auto& u : units_) {
        if (case_units_.empty() || case_units_.back().first != u.case_id) case_units_.push_back({u.case_id, {}});
        case_units_.back().second.push_back(u.unit_id);
    }
    std::sort(case_units_.begin(), case_units_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

std::span<const UnitId> Index::units_of(std::string_view case_id) const {
    const auto it = std::lower_bound(case_units_.begin(), case_units_.end(), case_id,
                                     [](const auto& entry, std::string_view id) { return entry.first < id; });
    if (it == case_units_.end() || it->first != case_id) return {};
    return it->second;
}

std::span<const Posting> Index::lookup(std::string_view field_name, std::string_view term) const {
    return lookup(parse_field(field_name), term);
}

bool Index::operator==(const Index& other) const {
    return granularity_ == other.granularity_ && pipeline_.stopwords == other.pipeline_.stopwords &&
           pipeline_.placeholders == other.pipeline_.placeholders &&
           pipeline_.min_token_len == other.pipeline_.min_token_len &&
           pipeline_.stemmer == other.pipeline_.stemmer && catalog_.raw_titles() == other.catalog_.raw_titles() &&
           units_ == other.units_ && body_ == other.body_ && statute_ == other.statute_;
}

// Binary layout (little-endian, see docs/index_format.md):
//   magic line "LEXCOURT-IDX v1\n"
//   header, pipeline, catalog, units, body field, statute field
//   u64 FNV-1a checksum of everything between the magic line and itself
class IndexSerializer {
  public:
    static std::string encode(const Index& index) {
        std::string out;
        put_u8(out, index.granularity_ == Granularity::document ? 0 : 1);
        put_u32(out, static_cast<std::uint32_t>(index.pipeline_.min_token_len));
        put_u8(out, index.pipeline_.stemmer == Stemmer::porter ? 0 : 1);
        put_sorted_set(out, index.pipeline_.stopwords);
        put_sorted_set(out, index.pipeline_.placeholders);

        const auto titles = index.catalog_.raw_titles();
        put_u32(out, static_cast<std::uint32_t>(titles.size()));
        for (const auto& t : titles) put_string(out, t);

        put_u32(out, static_cast<std::uint32_t>(index.units_.size()));
        for (const auto& u : index.units_) {
            put_string(out, u.case_id);
            put_u8(out, u.passage_index ? 1 : 0);
            put_u32(out, u.passage_index.value_or(0));
        }
        put_field(out, index.body_);
        put_field(out, index.statute_);
        put_u64(out, fnv1a(out));
        return out;
    }

    static Index decode(std::string_view payload) {
        if (payload.size() < 8) throw IoError("index file truncated");
        const auto body = payload.substr(0, payload.size() - 8);
        Reader checksum_reader{payload.substr(payload.size() - 8)};
        if (checksum_reader.u64() != fnv1a(body)) throw IoError("index file corrupt: checksum mismatch");

        Reader r{body};
        Index index;
        const auto g = r.u8();
        if (g > 1) throw IoError("index file corrupt: bad granularity");
        index.granularity_ = g == 0 ? Granularity::document : Granularity::passage;
        index.pipeline_.min_token_len = static_cast<int>(r.u32());
        index.pipeline_.stemmer = r.u8() == 0 ? Stemmer::porter : Stemmer::none;
        for (auto& s : r.strings()) index.pipeline_.stopwords.insert(std::move(s));
        for (auto& s : r.strings()) index.pipeline_.placeholders.insert(std::move(s));
        index.catalog_ = StatuteCatalog::from_titles(r.strings());

        const auto unit_count = r.u32();
        index.units_.reserve(unit_count);
        for (std::uint32_t i = 0; i < unit_count; ++i) {
            RetrievalUnit u;
            u.unit_id = i;
            u.case_id = r.string();
            const bool has_passage = r.u8() != 0;
            const auto passage = r.u32();
            if (has_passage) u.passage_index = passage;
            index.units_.push_back(std::move(u));
        }
        index.body_ = read_field(r, unit_count);
        index.statute_ = read_field(r, unit_count);
        if (!r.done()) throw IoError("index file corrupt: trailing bytes");
        for (auto& u : index.units_) {
            u.body_length = index.body_.unit_lengths_[u.unit_id];
            u.statute_length = index.statute_.unit_lengths_[u.unit_id];
        }
        index.rebuild_case_map();
        return index;
    }

  private:
    static std::uint64_t fnv1a(std::string_view data) {
        std::uint64_t h = 1469598103934665603ULL;
        for (const char c : data) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return h;
    }

    static void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }
    static void put_u32(std::string& out, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    static void put_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    static void put_string(std::string& out, std::string_view s) {
        put_u32(out, static_cast<std::uint32_t>(s.size()));
        out.append(s);
    }
    static void put_sorted_set(std::string& out, const std::unordered_set<std::string>& set) {
        std::vector<std::string> sorted(set.begin(), set.end());
        std::sort(sorted.begin(), sorted.end());
        put_u32(out, static_cast<std::uint32_t>(sorted.size()));
        for (const auto& s : sorted) put_string(out, s);
    }
    static void put_field(std::string& out, const FieldIndex& f) {
        put_u32(out, static_cast<std::uint32_t>(f.unit_lengths_.size()));
        for (const auto len : f.unit_lengths_) put_u32(out, len);
        put_u64(out, f.total_terms_);
        put_u32(out, static_cast<std::uint32_t>(f.terms_.size()));
        for (std::size_t t = 0; t < f.terms_.size(); ++t) {
            put_string(out, f.terms_[t]);
            put_u64(out, f.ctf_[t]);
            put_u32(out, static_cast<std::uint32_t>(f.postings_[t].size()));
            for (const auto& p : f.postings_[t]) {
                put_u32(out, p.unit);
                put_u32(out, p.tf);
            }
        }
    }

    struct Reader {
        std::string_view data;
        std::size_t pos = 0;

        void need(std::size_t n) const {
            if (data.size() - pos < n) throw IoError("index file truncated");
        }
        std::uint8_t u8() {
            need(1);
            return static_cast<std::uint8_t>(data[pos++]);
        }
        std::uint32_t u32() {
            need(4);
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
            return v;
        }
        std::uint64_t u64() {
            need(8);
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
            return v;
        }
        std::string string() {
            const auto len = u32();
            need(len);
            std::string s(data.substr(pos, len));
            pos += len;
            return s;
        }
        std::vector<std::string> strings() {
            const auto count = u32();
            std::vector<std::string> out;
            for (std::uint32_t i = 0; i < count; ++i) out.push_back(string());
            return out;
        }
        bool done() const { return pos == data.size(); }
    };

    static FieldIndex read_field(Reader& r, std::uint32_t unit_count) {
        FieldIndex f;
        if (r.u32() != unit_count) throw IoError("index file corrupt: unit count mismatch");
        f.unit_lengths_.reserve(unit_count);
        for (std::uint32_t i = 0; i < unit_count; ++i) f.unit_lengths_.push_back(r.u32());
        f.total_terms_ = r.u64();
        const auto term_count = r.u32();
        for (std::uint32_t t = 0; t < term_count; ++t) {
            f.terms_.push_back(r.string());
            f.ctf_.push_back(r.u64());
            const auto n = r.u32();
            std::vector<Posting> plist;
            plist.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i) {
                Posting p;
                p.unit = r.u32();
                p.tf = r.u32();
                if (p.unit >= unit_count || p.tf == 0 || (!plist.empty() && p.unit <= plist.back().unit)) {
                    throw IoError("index file corrupt: invalid postings");
                }
                plist.push_back(p);
            }
            f.postings_.push_back(std::move(plist));
        }
        if (!std::is_sorted(f.terms_.begin(), f.terms_.end())) throw IoError("index file corrupt: unsorted terms");
        return f;
    }
};

void Index::save(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write index: " + path.string());
    out << kIndexMagic << '\n' << IndexSerializer::encode(*this);
    if (!out) throw IoError("failed writing index: " + path.string());
}

Index Index::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read index: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto data = buffer.str();
    const std::string expected = std::string(kIndexMagic) + "\n";
    if (data.compare(0, expected.size(), expected) != 0) {
        throw IoError("not a lexcourt index or unsupported version (expected header \"" + std::string(kIndexMagic) +
                      "\"): " + path.string());
    }
    return IndexSerializer::decode(std::string_view(data).substr(expected.size()));
}

}  // namespace lexcourt
