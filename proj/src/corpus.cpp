#include "lexcourt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "lexcourt/error.hpp"
#include "lexcourt/textproc.hpp"

namespace fs = std::filesystem;

namespace lexcourt {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

bool starts_with_paragraph_number(std::string_view line) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] != '[') return false;
    std::size_t i = first + 1;
    const auto digits_start = i;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    return i > digits_start && i < line.size() && line[i] == ']';
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

template <typename T>
Summary<T> summarize(std::vector<T> values) {
    Summary<T> s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.max = values.back();
    const auto n = values.size();
    s.median = n % 2 == 1 ? static_cast<double>(values[n / 2])
                          : (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
    s.mean = static_cast<double>(std::accumulate(values.begin(), values.end(), T{})) / static_cast<double>(n);
    return s;
}

}  // namespace

const Case& Collection::at(const std::string& case_id) const {
    const auto it = cases.find(case_id);
    if (it == cases.end()) throw ValidationError("unknown case id: " + case_id);
    return it->second;
}

std::vector<std::string> split_passages(std::string_view case_text) {
    std::vector<std::string> passages;
    std::string current;
    auto flush = [&] {
        const auto t = trim(current);
        if (!t.empty()) passages.emplace_back(t);
        current.clear();
    };

    std::size_t pos = 0;
    while (pos <= case_text.size()) {
        auto end = case_text.find('\n', pos);
        if (end == std::string_view::npos) end = case_text.size();
        const auto line = case_text.substr(pos, end - pos);
        if (is_blank(line)) {
            flush();
        } else {
            if (starts_with_paragraph_number(line)) flush();
            if (!current.empty()) current += '\n';
            current += line;
        }
        if (end == case_text.size()) break;
        pos = end + 1;
    }
    flush();
    return passages;
}

Case make_case(std::string case_id, std::string raw_text, bool is_query) {
    Case c;
    c.case_id = std::move(case_id);
    c.raw_text = std::move(raw_text);
    c.is_query = is_query;
    auto texts = split_passages(c.raw_text);
    c.passages.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        c.passages.push_back(Passage{c.case_id, i, std::move(texts[i])});
    }
    return c;
}

Qrels load_qrels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read qrels: " + path.string());
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto tab = content.find('\t');
        if (tab == std::string_view::npos) {
            throw ValidationError("qrels line " + std::to_string(line_no) + ": expected query_id<TAB>notice_id");
        }
        const auto query = trim(content.substr(0, tab));
        const auto notice = trim(content.substr(tab + 1));
        if (query.empty() || notice.empty() || notice.find('\t') != std::string_view::npos) {
            throw ValidationError("qrels line " + std::to_string(line_no) + ": expected two columns");
        }
        qrels[std::string(query)].insert(std::string(notice));
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& [query, notices] : qrels) {
        for (const auto& notice : notices) out << query << '\t' << notice << '\n';
    }
}

std::vector<std::string> load_id_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read id list: " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto id = trim(line);
        if (!id.empty()) ids.emplace_back(id);
    }
    return ids;
}

void validate_collection(const Collection& collection) {
    std::set<std::string> unknown;
    for (const auto& [query, notices] : collection.qrels) {
        if (!collection.cases.contains(query)) unknown.insert(query);
        for (const auto& n : notices) {
            if (!collection.cases.contains(n)) unknown.insert(n);
        }
    }
    for (const auto& q : collection.query_order) {
        if (!collection.cases.contains(q)) unknown.insert(q);
    }
    if (!unknown.empty()) {
        throw ValidationError("unknown case ids: " + join({unknown.begin(), unknown.end()}, ", "));
    }
    if (collection.labeled()) {
        std::vector<std::string> unsupported;
        for (const auto& q : collection.query_order) {
            const auto it = collection.qrels.find(q);
            if (it == collection.qrels.end() || it->second.empty()) unsupported.push_back(q);
        }
        if (!unsupported.empty()) {
            throw ValidationError("queries without notice cases: " + join(unsupported, ", "));
        }
    }
}

Collection load_collection(const fs::path& corpus_dir, const std::optional<fs::path>& qrels_path,
                           const std::optional<fs::path>& query_list_path) {
    std::error_code ec;
    if (!fs::is_directory(corpus_dir, ec)) throw IoError("corpus directory not found: " + corpus_dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    if (files.empty()) throw ValidationError("no case files (*.txt) in " + corpus_dir.string());

    Collection collection;
    std::vector<std::string> empty_files;
    for (const auto& file : files) {
        auto text = read_file(file);
        if (trim(text).empty()) {
            empty_files.push_back(file.filename().string());
            continue;
        }
        auto id = file.stem().string();
        collection.cases.emplace(id, make_case(id, std::move(text)));
    }
    if (!empty_files.empty()) throw ValidationError("empty case files: " + join(empty_files, ", "));

    if (qrels_path) collection.qrels = load_qrels(*qrels_path);
    if (query_list_path) {
        collection.query_order = load_id_list(*query_list_path);
    } else {
        for (const auto& [query, notices] : collection.qrels) collection.query_order.push_back(query);
    }
    validate_collection(collection);
    for (const auto& q : collection.query_order) collection.cases.at(q).is_query = true;
    return collection;
}

CollectionStats collection_stats(const Collection& collection) {
    CollectionStats stats;
    stats.total_cases = collection.cases.size();
    std::vector<std::size_t> token_counts;
    token_counts.reserve(collection.cases.size());
    for (const auto& [id, c] : collection.cases) {
        token_counts.push_back(tokenize(c.raw_text).size());
        if (c.is_query) ++stats.query_cases;
    }
    stats.tokens_per_document = summarize(std::move(token_counts));
    if (collection.labeled()) {
        std::vector<std::size_t> notices;
        for (const auto& [query, rel] : collection.qrels) notices.push_back(rel.size());
        stats.notice_cases_per_query = summarize(std::move(notices));
    }
    return stats;
}

std::string stats_to_json(const CollectionStats& stats) {
    nlohmann::ordered_json j;
    j["total_cases"] = stats.total_cases;
    j["query_cases"] = stats.query_cases;
    j["tokens_per_document"] = {{"max", stats.tokens_per_document.max},
                                {"median", stats.tokens_per_document.median},
                                {"mean", stats.tokens_per_document.mean}};
    if (stats.notice_cases_per_query) {
        j["notice_cases_per_query"] = {{"max", stats.notice_cases_per_query->max},
                                       {"median", stats.notice_cases_per_query->median},
                                       {"mean", stats.notice_cases_per_query->mean}};
    } else {
        j["notice_cases_per_query"] = nullptr;
    }
    return j.dump(2);
}

void write_collection(const Collection& collection, const fs::path& dir) {
    const auto cases_dir = dir / "cases";
    fs::create_directories(cases_dir);
    for (const auto& [id, c] : collection.cases) {
        std::ofstream out(cases_dir / (id + ".txt"), std::ios::binary);
        if (!out) throw IoError("cannot write case " + id);
        out << c.raw_text;
    }
    if (collection.labeled()) write_qrels(collection.qrels, dir / "qrels.tsv");
    std::ofstream queries(dir / "queries.txt", std::ios::binary);
    for (const auto& q : collection.query_order) queries << q << '\n';
}

}  // namespace lexcourt
