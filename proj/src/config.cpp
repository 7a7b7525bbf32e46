#include "lexcourt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "lexcourt/error.hpp"
#include "lexcourt/eval.hpp"

namespace lexcourt {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto result = std::from_chars(value.data(), end, out);
    if (result.ec != std::errc() || result.ptr != end) throw ArgumentError("bad value for " + key + ": " + value);
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    const auto* end = value.data() + value.size();
    const auto result = std::from_chars(value.data(), end, out);
    if (result.ec != std::errc() || result.ptr != end) throw ArgumentError("bad value for " + key + ": " + value);
    return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

RetrievalConfig ExperimentConfig::retrieval() const {
    RetrievalConfig r;
    r.scorer.scorer = scorer;
    r.scorer.bm25 = {k1, b};
    r.scorer.lm = {lambda};
    r.extraction.max_terms = max_terms;
    r.fusion.k_rrf = k_rrf;
    r.fusion.passage_boost = passage_boost;
    r.fusion.statute_boost = statute_boost;
    r.fusion.per_passage_depth = passage_depth.value_or(depth);
    r.depth = depth;
    return r;
}

PipelineConfig ExperimentConfig::pipeline() const {
    auto p = PipelineConfig::defaults();
    if (stopwords_path) {
        p.stopwords.clear();
        for (const auto& w : load_word_list(*stopwords_path)) p.stopwords.insert(to_lower(w));
    }
    if (placeholders_path) {
        p.placeholders.clear();
        for (const auto& w : load_word_list(*placeholders_path)) p.placeholders.insert(to_lower(w));
    }
    return p;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "scorer") {
        scorer = parse_scorer(value);
    } else if (key == "k1") {
        k1 = parse_double(key, value);
    } else if (key == "b") {
        b = parse_double(key, value);
    } else if (key == "lambda") {
        lambda = parse_double(key, value);
    } else if (key == "T") {
        if (value == "none" || value.empty()) {
            max_terms.reset();
        } else {
            max_terms = parse_count(key, value);
            if (*max_terms < 1) throw ArgumentError("T must be >= 1");
        }
    } else if (key == "k_rrf") {
        k_rrf = parse_double(key, value);
    } else if (key == "P_b") {
        passage_boost = parse_double(key, value);
    } else if (key == "s_b") {
        statute_boost = parse_double(key, value);
    } else if (key == "depth") {
        depth = parse_count(key, value);
    } else if (key == "passage_depth") {
        if (value == "none" || value.empty()) {
            passage_depth.reset();
        } else {
            passage_depth = parse_count(key, value);
        }
    } else if (key == "granularity") {
        granularity = parse_granularity(value);
    } else if (key == "stopwords_path") {
        stopwords_path = value;
    } else if (key == "placeholders_path") {
        placeholders_path = value;
    } else if (key == "cutoff") {
        cutoff = parse_count(key, value);
    } else {
        throw ArgumentError("unknown config key: " + key);
    }
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "scorer=" << to_string(scorer) << '\n';
    out << "k1=" << format_real(k1) << '\n';
    out << "b=" << format_real(b) << '\n';
    out << "lambda=" << format_real(lambda) << '\n';
    out << "T=" << (max_terms ? std::to_string(*max_terms) : "none") << '\n';
    out << "k_rrf=" << format_real(k_rrf) << '\n';
    out << "P_b=" << format_real(passage_boost) << '\n';
    out << "s_b=" << format_real(statute_boost) << '\n';
    out << "depth=" << depth << '\n';
    if (passage_depth) out << "passage_depth=" << *passage_depth << '\n';
    out << "granularity=" << to_string(granularity) << '\n';
    if (stopwords_path) out << "stopwords_path=" << stopwords_path->string() << '\n';
    if (placeholders_path) out << "placeholders_path=" << placeholders_path->string() << '\n';
    if (cutoff) out << "cutoff=" << *cutoff << '\n';
    return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig config;
    for (const auto& [key, value] : parse_key_values(text)) config.set(key, value);
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write config: " + path.string());
    out << to_text();
}

}  // namespace lexcourt
