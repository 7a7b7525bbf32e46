#include "lexcourt/eval.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexcourt/error.hpp"

namespace lexcourt {

std::vector<RankMetrics> metrics_at_ranks(std::span<const CaseRanking> runs, const Qrels& qrels, std::size_t max_rank) {
    if (max_rank < 1) throw ArgumentError("max_rank must be >= 1");
    std::vector<std::string> missing;
    for (const auto& run : runs) {
        if (!qrels.contains(run.query_id)) missing.push_back(run.query_id);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ValidationError("run queries without qrels: " + list);
    }

    std::vector<std::uint64_t> tp(max_rank + 1, 0);
    std::vector<std::uint64_t> retrieved(max_rank + 1, 0);
    std::uint64_t relevant = 0;
    for (const auto& run : runs) {
        const auto& rel = qrels.at(run.query_id);
        relevant += rel.size();
        std::set<std::string_view> seen;
        std::uint64_t hits = 0;
        for (std::size_t k = 1; k <= max_rank; ++k) {
            if (k <= run.results.size()) {
                const auto& id = run.results[k - 1].case_id;
                if (rel.contains(id) && seen.insert(id).second) ++hits;
                ++retrieved[k];
            }
            tp[k] += hits;
        }
    }
    // retrieved[k] so far counts queries with a result at position k; make it cumulative.
    for (std::size_t k = 2; k <= max_rank; ++k) retrieved[k] += retrieved[k - 1];

    std::vector<RankMetrics> metrics;
    metrics.reserve(max_rank);
    for (std::size_t k = 1; k <= max_rank; ++k) {
        RankMetrics m;
        m.k = k;
        m.true_positives = tp[k];
        m.retrieved = retrieved[k];
        m.relevant = relevant;
        m.precision = m.retrieved == 0 ? 0.0 : static_cast<double>(m.true_positives) / static_cast<double>(m.retrieved);
        m.recall = m.relevant == 0 ? 0.0 : static_cast<double>(m.true_positives) / static_cast<double>(m.relevant);
        m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        metrics.push_back(m);
    }
    return metrics;
}

std::size_t select_cutoff(std::span<const RankMetrics> metrics) {
    if (metrics.empty()) throw ArgumentError("select_cutoff: no metrics");
    const RankMetrics* best = &metrics.front();
    for (const auto& m : metrics) {
        if (m.f1 > best->f1) best = &m;
    }
    return best->k;
}

const RankMetrics& metrics_at(std::span<const RankMetrics> metrics, std::size_t k) {
    for (const auto& m : metrics) {
        if (m.k == k) return m;
    }
    throw ArgumentError("no metrics at rank " + std::to_string(k));
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_train_dev(std::span<const std::string> queries,
                                                                              const SplitConfig& config) {
    if (config.train_count < 1 || config.train_count >= queries.size()) {
        throw ArgumentError("train count " + std::to_string(config.train_count) + " must lie in [1, " +
                            std::to_string(queries.size()) + ")");
    }
    const auto split = queries.begin() + static_cast<std::ptrdiff_t>(config.train_count);
    return {{queries.begin(), split}, {split, queries.end()}};
}

std::string format_real(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string metrics_to_tsv(std::span<const RankMetrics> metrics) {
    std::string out = "k\tprecision\trecall\tf1\n";
    for (const auto& m : metrics) {
        out += std::to_string(m.k) + '\t' + format_real(m.precision) + '\t' + format_real(m.recall) + '\t' +
               format_real(m.f1) + '\n';
    }
    return out;
}

std::vector<RankMetrics> metrics_from_tsv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<RankMetrics> metrics;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            if (line.rfind("k\t", 0) == 0) continue;
        }
        if (line.empty()) continue;
        std::istringstream row(line);
        RankMetrics m;
        if (!(row >> m.k >> m.precision >> m.recall >> m.f1)) throw ValidationError("bad metrics row: " + line);
        metrics.push_back(m);
    }
    return metrics;
}

std::string cutoff_summary_json(std::span<const RankMetrics> metrics, std::size_t queries) {
    const auto k = select_cutoff(metrics);
    const auto& m = metrics_at(metrics, k);
    nlohmann::ordered_json j;
    j["cutoff"] = k;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["queries"] = queries;
    return j.dump(2);
}

}  // namespace lexcourt
