#include "lexcourt/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "lexcourt/error.hpp"
#include "lexcourt/retrieval.hpp"

namespace lexcourt {

namespace {

// Uniform on the open interval (0, 1) from the top 53 bits of a draw.
double unit_open(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double sample(const RealRange& range, std::mt19937_64& rng) {
    const double u = unit_open(rng);
    if (range.lo == range.hi) return range.lo;
    return range.lo + (range.hi - range.lo) * u;
}

void check_range(const RealRange& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
        throw ArgumentError(std::string("invalid range for ") + name);
    }
}

}  // namespace

void ParamSpace::validate() const {
    check_range(k1, "k1");
    check_range(b, "b");
    check_range(lambda, "lambda");
    check_range(passage_boost, "P_b");
    check_range(statute_boost, "s_b");
    if (k1.lo < 0.0) throw ArgumentError("k1 range must be non-negative");
    if (b.lo < 0.0 || b.hi > 1.0) throw ArgumentError("b range must lie in [0, 1]");
    if (lambda.lo < 0.0 || lambda.hi > 1.0) throw ArgumentError("lambda range must lie in [0, 1]");
    if (lambda.lo == lambda.hi && (lambda.lo <= 0.0 || lambda.lo >= 1.0)) {
        throw ArgumentError("pinned lambda must lie in (0, 1)");
    }
    if (max_terms.empty()) throw ArgumentError("T needs at least one choice");
    for (const auto& t : max_terms) {
        if (t && *t < 1) throw ArgumentError("T choices must be >= 1");
    }
}

ParamSpace ParamSpace::without_statutes() {
    ParamSpace space;
    space.passage_boost = {1.0, 1.0};
    space.statute_boost = {0.0, 0.0};
    return space;
}

ParamSpace ParamSpace::point(const ExperimentConfig& config) {
    ParamSpace space;
    space.k1 = {config.k1, config.k1};
    space.b = {config.b, config.b};
    space.lambda = {config.lambda, config.lambda};
    space.max_terms = {config.max_terms};
    space.passage_boost = {config.passage_boost, config.passage_boost};
    space.statute_boost = {config.statute_boost, config.statute_boost};
    return space;
}

ExperimentConfig TrialParams::apply(ExperimentConfig base) const {
    base.k1 = k1;
    base.b = b;
    base.lambda = lambda;
    base.max_terms = max_terms;
    base.passage_boost = passage_boost;
    base.statute_boost = statute_boost;
    return base;
}

std::vector<TrialParams> sample_trials(const ParamSpace& space, std::size_t n_trials, std::uint64_t seed) {
    space.validate();
    std::mt19937_64 rng(seed);
    std::vector<TrialParams> trials;
    trials.reserve(n_trials);
    for (std::size_t i = 0; i < n_trials; ++i) {
        TrialParams p;
        p.k1 = sample(space.k1, rng);
        p.b = sample(space.b, rng);
        p.lambda = sample(space.lambda, rng);
        p.max_terms = space.max_terms[rng() % space.max_terms.size()];
        p.passage_boost = sample(space.passage_boost, rng);
        p.statute_boost = sample(space.statute_boost, rng);
        trials.push_back(p);
    }
    return trials;
}

TrialResult evaluate_trial(const TuningContext& context, std::size_t trial, const TrialParams& params) {
    if (context.index == nullptr || context.collection == nullptr) throw ArgumentError("tuning context incomplete");
    const auto config = params.apply(context.base).retrieval();
    const auto runs = run_queries(*context.index, *context.collection, context.queries, config, context.execution);

    TrialResult result;
    result.trial = trial;
    result.params = params;
    result.metrics = metrics_at_ranks(runs, context.collection->qrels, context.max_rank);
    result.best_k = select_cutoff(result.metrics);
    result.best_f1 = metrics_at(result.metrics, result.best_k).f1;
    return result;
}

std::vector<TrialResult> run_random_search(const ParamSpace& space, std::size_t n_trials, std::uint64_t seed,
                                           const TuningContext& context, std::span<const TrialResult> resumed,
                                           const std::function<void(const TrialResult&)>& on_trial) {
    if (n_trials < 1) throw ArgumentError("n_trials must be >= 1");
    const auto trials = sample_trials(space, n_trials, seed);

    std::vector<TrialResult> results;
    results.reserve(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto logged = std::find_if(resumed.begin(), resumed.end(), [&](const TrialResult& r) {
            return r.trial == i && r.params == trials[i];
        });
        results.push_back(logged != resumed.end() ? *logged : evaluate_trial(context, i, trials[i]));
        if (on_trial) on_trial(results.back());
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const TrialResult& a, const TrialResult& b) { return a.best_f1 > b.best_f1; });
    return results;
}

std::string trial_to_json(const TrialResult& trial) {
    nlohmann::ordered_json j;
    j["trial"] = trial.trial;
    nlohmann::ordered_json params;
    params["k1"] = trial.params.k1;
    params["b"] = trial.params.b;
    params["lambda"] = trial.params.lambda;
    if (trial.params.max_terms) {
        params["T"] = *trial.params.max_terms;
    } else {
        params["T"] = nullptr;
    }
    params["P_b"] = trial.params.passage_boost;
    params["s_b"] = trial.params.statute_boost;
    j["params"] = params;
    j["best_f1"] = trial.best_f1;
    j["best_k"] = trial.best_k;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& m : trial.metrics) {
        rows.push_back({m.k, m.true_positives, m.retrieved, m.relevant, m.precision, m.recall, m.f1});
    }
    j["metrics"] = rows;
    return j.dump();
}

TrialResult trial_from_json(const std::string& line) {
    try {
        const auto j = nlohmann::json::parse(line);
        TrialResult t;
        t.trial = j.at("trial").get<std::size_t>();
        const auto& p = j.at("params");
        t.params.k1 = p.at("k1").get<double>();
        t.params.b = p.at("b").get<double>();
        t.params.lambda = p.at("lambda").get<double>();
        if (!p.at("T").is_null()) t.params.max_terms = p.at("T").get<std::size_t>();
        t.params.passage_boost = p.at("P_b").get<double>();
        t.params.statute_boost = p.at("s_b").get<double>();
        t.best_f1 = j.at("best_f1").get<double>();
        t.best_k = j.at("best_k").get<std::size_t>();
        for (const auto& row : j.at("metrics")) {
            RankMetrics m;
            m.k = row.at(0).get<std::size_t>();
            m.true_positives = row.at(1).get<std::uint64_t>();
            m.retrieved = row.at(2).get<std::uint64_t>();
            m.relevant = row.at(3).get<std::uint64_t>();
            m.precision = row.at(4).get<double>();
            m.recall = row.at(5).get<double>();
            m.f1 = row.at(6).get<double>();
            t.metrics.push_back(m);
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad trial log line: ") + e.what());
    }
}

std::vector<TrialResult> read_trials_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read trials log: " + path.string());
    std::vector<TrialResult> trials;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        trials.push_back(trial_from_json(line));
    }
    return trials;
}

}  // namespace lexcourt
