#include "lexcourt/runfile.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "lexcourt/error.hpp"
#include "lexcourt/eval.hpp"

namespace lexcourt {

std::string format_run(std::span<const CaseRanking> rankings, const std::string& run_tag) {
    std::string out;
    for (const auto& r : rankings) {
        for (std::size_t i = 0; i < r.results.size(); ++i) {
            out += r.query_id;
            out += " Q0 ";
            out += r.results[i].case_id;
            out += ' ';
            out += std::to_string(i + 1);
            out += ' ';
            out += format_real(r.results[i].score);
            out += ' ';
            out += run_tag;
            out += '\n';
        }
    }
    return out;
}

void write_run(std::span<const CaseRanking> rankings, const std::string& run_tag, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write run file: " + path.string());
    out << format_run(rankings, run_tag);
}

std::vector<CaseRanking> parse_run(const std::string& text) {
    struct Row {
        std::size_t rank;
        RankedCase result;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string query, q0, case_id, tag;
        std::size_t rank = 0;
        double score = 0.0;
        if (!(fields >> query >> q0 >> case_id >> rank >> score >> tag) || rank < 1) {
            throw ValidationError("run file line " + std::to_string(line_no) + ": expected 6 TREC columns");
        }
        auto [it, inserted] = rows.try_emplace(query);
        if (inserted) order.push_back(query);
        it->second.push_back({rank, {case_id, score}});
    }
    std::vector<CaseRanking> rankings;
    rankings.reserve(order.size());
    for (const auto& q : order) {
        auto& r = rows.at(q);
        std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
        CaseRanking ranking;
        ranking.query_id = q;
        for (auto& row : r) ranking.results.push_back(std::move(row.result));
        rankings.push_back(std::move(ranking));
    }
    return rankings;
}

std::vector<CaseRanking> read_run(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read run file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run(buffer.str());
}

std::string format_submission(std::span<const CaseRanking> rankings, std::size_t cutoff) {
    std::string out;
    for (const auto& r : rankings) {
        const auto n = std::min(cutoff, r.results.size());
        for (std::size_t i = 0; i < n; ++i) out += r.query_id + '\t' + r.results[i].case_id + '\n';
    }
    return out;
}

}  // namespace lexcourt
