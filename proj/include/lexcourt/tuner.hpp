#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexcourt/config.hpp"
#include "lexcourt/corpus.hpp"
#include "lexcourt/eval.hpp"
#include "lexcourt/execution.hpp"
#include "lexcourt/index.hpp"

namespace lexcourt {

/// Closed range; lo == hi pins the parameter.
struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct ParamSpace {
    RealRange k1{0.0, 3.0};
    RealRange b{0.0, 1.0};
    /// Sampled from the open interval.
    RealRange lambda{0.0, 1.0};
    std::vector<std::optional<std::size_t>> max_terms{50, 100, 200, 500, std::nullopt};
    RealRange passage_boost{1.0, 10.0};
    RealRange statute_boost{0.0, 5.0};

    void validate() const;
    /// Space with the statute parameters pinned to their neutral values.
    static ParamSpace without_statutes();
    /// Every parameter pinned to the values of `config`.
    static ParamSpace point(const ExperimentConfig& config);
};

struct TrialParams {
    double k1 = 0.0;
    double b = 0.0;
    double lambda = 0.0;
    std::optional<std::size_t> max_terms;
    double passage_boost = 1.0;
    double statute_boost = 0.0;

    bool operator==(const TrialParams&) const = default;

    /// base with the sampled parameters substituted.
    ExperimentConfig apply(ExperimentConfig base) const;
};

struct TrialResult {
    std::size_t trial = 0;
    TrialParams params;
    double best_f1 = 0.0;
    std::size_t best_k = 0;
    std::vector<RankMetrics> metrics;

    bool operator==(const TrialResult&) const = default;
};

/// Draws n parameter sets from a mt19937_64 stream seeded with `seed`.
/// Every trial consumes the same number of draws, so trial i does not depend
/// on the space of the other parameters.
std::vector<TrialParams> sample_trials(const ParamSpace& space, std::size_t n_trials, std::uint64_t seed);

struct TuningContext {
    const Index* index = nullptr;
    const Collection* collection = nullptr;
    std::vector<std::string> queries;
    /// Scorer, k_rrf and depth come from here; sampled values override the rest.
    ExperimentConfig base;
    std::size_t max_rank = 100;
    Execution execution = Execution::parallel;
};

/// Full retrieval + metrics_at_ranks + select_cutoff for one parameter set.
TrialResult evaluate_trial(const TuningContext& context, std::size_t trial, const TrialParams& params);

/// Random search. Trials found in `resumed` (same index and parameters) are
/// reused instead of re-evaluated. on_trial sees every trial in index order.
/// Returns the trials sorted by best_f1 descending, ties by trial index.
std::vector<TrialResult> run_random_search(const ParamSpace& space, std::size_t n_trials, std::uint64_t seed,
                                           const TuningContext& context,
                                           std::span<const TrialResult> resumed = {},
                                           const std::function<void(const TrialResult&)>& on_trial = {});

/// One JSON object per line.
std::string trial_to_json(const TrialResult& trial);
TrialResult trial_from_json(const std::string& line);
std::vector<TrialResult> read_trials_log(const std::filesystem::path& path);

}  // namespace lexcourt
