#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexcourt/config.hpp"
#include "lexcourt/corpus.hpp"
#include "lexcourt/error.hpp"
#include "lexcourt/eval.hpp"
#include "lexcourt/index.hpp"
#include "lexcourt/log.hpp"
#include "lexcourt/retrieval.hpp"
#include "lexcourt/runfile.hpp"
#include "lexcourt/statutes.hpp"
#include "lexcourt/synthetic.hpp"
#include "lexcourt/tuner.hpp"

namespace fs = std::filesystem;
using namespace lexcourt;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

// Hyperparameter flags shared by search and tune; flags override --config.
struct ParamFlags {
    std::optional<std::string> config;
    std::optional<std::string> scorer, k1, b, lambda, T, k_rrf, P_b, s_b, depth, passage_depth;
    std::optional<std::string> stopwords, placeholders;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "key=value config file")->check(CLI::ExistingFile);
        cmd->add_option("--scorer", scorer, "bm25 or lm");
        cmd->add_option("--k1", k1, "BM25 k1");
        cmd->add_option("--b", b, "BM25 b");
        cmd->add_option("--lambda", lambda, "Jelinek-Mercer lambda");
        cmd->add_option("--T", T, "query terms per query (number or 'none')");
        cmd->add_option("--krrf", k_rrf, "reciprocal rank fusion constant");
        cmd->add_option("--Pb", P_b, "boost of passage queries that cite a section");
        cmd->add_option("--sb", s_b, "weight of the statute field");
        cmd->add_option("--depth", depth, "case results per query (at most 100)");
        cmd->add_option("--passage-depth", passage_depth, "units kept per passage query (default: depth)");
        cmd->add_option("--stopwords", stopwords, "stopword list, one per line")->check(CLI::ExistingFile);
        cmd->add_option("--placeholders", placeholders, "placeholder tokens, one per line")->check(CLI::ExistingFile);
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config ? ExperimentConfig::load(*config) : ExperimentConfig{};
        const std::pair<const char*, const std::optional<std::string>*> flags[] = {
            {"scorer", &scorer}, {"k1", &k1},   {"b", &b},           {"lambda", &lambda},
            {"T", &T},           {"k_rrf", &k_rrf}, {"P_b", &P_b},   {"s_b", &s_b},
            {"depth", &depth},   {"passage_depth", &passage_depth},  {"stopwords_path", &stopwords},
            {"placeholders_path", &placeholders}};
        for (const auto& [key, value] : flags) {
            if (*value) cfg.set(key, **value);
        }
        return cfg;
    }
};

std::vector<std::string> resolve_queries(const Collection& collection, const std::optional<std::string>& list) {
    if (list) return load_id_list(*list);
    if (!collection.query_order.empty()) return collection.query_order;
    throw ArgumentError("no query cases: pass --queries or --qrels");
}

int cmd_stats(const std::string& corpus, const std::optional<std::string>& qrels,
              const std::optional<std::string>& queries) {
    const auto collection = load_collection(corpus, qrels ? std::optional<fs::path>(*qrels) : std::nullopt,
                                            queries ? std::optional<fs::path>(*queries) : std::nullopt);
    std::cout << stats_to_json(collection_stats(collection)) << '\n';
    return 0;
}

int cmd_annotate(const std::string& corpus, const std::string& titles, const std::string& output, Execution exec) {
    const auto collection = load_collection(corpus);
    const auto catalog = load_statute_titles(titles);
    save_annotations(annotate_collection(collection, catalog, exec), output);
    return 0;
}

struct IndexArgs {
    std::string corpus;
    std::optional<std::string> titles;
    std::optional<std::string> annotations;
    std::optional<std::string> granularity;
    std::string output;
    ParamFlags params;
};

int cmd_index(const IndexArgs& args, Execution exec) {
    auto cfg = args.params.resolve();
    if (args.granularity) cfg.set("granularity", *args.granularity);
    if (args.annotations && !args.titles) throw ArgumentError("--annotations needs the --titles catalog they came from");

    const auto collection = load_collection(args.corpus);
    IndexBuildOptions options;
    options.granularity = cfg.granularity;
    options.pipeline = cfg.pipeline();
    options.execution = exec;

    std::optional<PassageAnnotations> annotations;
    if (args.titles) {
        options.catalog = load_statute_titles(*args.titles);
        annotations = args.annotations ? load_annotations(*args.annotations)
                                       : annotate_collection(collection, options.catalog, exec);
    }
    const auto index = Index::build(collection, annotations ? &*annotations : nullptr, options);
    index.save(args.output);
    return 0;
}

struct SearchArgs {
    std::string index;
    std::string corpus;
    std::optional<std::string> queries;
    std::optional<std::string> qrels;
    std::string output;
    std::string tag = "lexcourt";
    ParamFlags params;
};

int cmd_search(const SearchArgs& args, Execution exec) {
    const auto cfg = args.params.resolve();
    const auto index = Index::load(args.index);
    const auto collection = load_collection(args.corpus, args.qrels ? std::optional<fs::path>(*args.qrels) : std::nullopt);
    const auto queries = resolve_queries(collection, args.queries);
    const auto runs = run_queries(index, collection, queries, cfg.retrieval(), exec);
    write_run(runs, args.tag, args.output);
    return 0;
}

int cmd_eval(const std::string& run_path, const std::string& qrels_path, std::size_t max_rank,
             const std::optional<std::string>& queries, const std::optional<std::string>& output) {
    auto runs = read_run(run_path);
    const auto qrels = load_qrels(qrels_path);
    if (queries) {
        // Queries listed but absent from the run count as empty rankings.
        std::vector<CaseRanking> ordered;
        for (const auto& q : load_id_list(*queries)) {
            const auto it = std::find_if(runs.begin(), runs.end(), [&](const CaseRanking& r) { return r.query_id == q; });
            ordered.push_back(it != runs.end() ? *it : CaseRanking{q, {}});
        }
        runs = std::move(ordered);
    }
    if (runs.empty()) throw ValidationError("run file has no rows: " + run_path);
    const auto metrics = metrics_at_ranks(runs, qrels, max_rank);
    if (output) {
        write_text(*output, metrics_to_tsv(metrics));
    }
    std::cout << cutoff_summary_json(metrics, runs.size()) << '\n';
    return 0;
}

struct TuneArgs {
    std::string index;
    std::string corpus;
    std::string qrels;
    std::optional<std::string> queries;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::size_t train_count = 700;
    std::string log = "trials.jsonl";
    std::optional<std::string> resume;
    std::string best_config = "best.cfg";
    bool no_statute = false;
    ParamFlags params;
};

int cmd_tune(const TuneArgs& args, Execution exec) {
    const auto base = args.params.resolve();
    const auto index = Index::load(args.index);
    const auto collection = load_collection(args.corpus, fs::path(args.qrels),
                                            args.queries ? std::optional<fs::path>(*args.queries) : std::nullopt);
    const auto queries = resolve_queries(collection, args.queries);
    const auto [train, dev] = split_train_dev(queries, SplitConfig{args.train_count});

    std::vector<TrialResult> resumed;
    if (args.resume) resumed = read_trials_log(*args.resume);

    TuningContext context;
    context.index = &index;
    context.collection = &collection;
    context.queries = train;
    context.base = base;
    context.execution = exec;

    std::ofstream log(args.log, std::ios::binary);
    if (!log) throw IoError("cannot write " + args.log);
    const auto space = args.no_statute ? ParamSpace::without_statutes() : ParamSpace{};
    const auto results = run_random_search(space, args.trials, args.seed, context, resumed,
                                           [&](const TrialResult& t) { log << trial_to_json(t) << '\n' << std::flush; });
    const auto& best = results.front();

    auto best_cfg = best.params.apply(base);
    best_cfg.granularity = index.granularity();
    best_cfg.cutoff = best.best_k;
    best_cfg.save(args.best_config);

    const auto dev_runs = run_queries(index, collection, dev, best_cfg.retrieval(), exec);
    const auto dev_metrics = metrics_at_ranks(dev_runs, collection.qrels, context.max_rank);
    const auto& at_k = metrics_at(dev_metrics, best.best_k);

    nlohmann::ordered_json summary;
    summary["train_queries"] = train.size();
    summary["dev_queries"] = dev_runs.size();
    summary["trials"] = results.size();
    summary["best_trial"] = best.trial;
    summary["cutoff"] = best.best_k;
    summary["train_f1"] = best.best_f1;
    summary["dev"] = {{"precision", at_k.precision}, {"recall", at_k.recall}, {"f1", at_k.f1}};
    summary["k_rrf"] = best_cfg.k_rrf;
    summary["depth"] = best_cfg.depth;
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_submit(const std::string& run_path, std::optional<std::size_t> cutoff, const std::optional<std::string>& config,
               const std::string& output) {
    if (!cutoff && config) cutoff = ExperimentConfig::load(*config).cutoff;
    if (!cutoff) throw ArgumentError("--cutoff is required (or a --config with cutoff=)");
    if (*cutoff < 1) throw ArgumentError("--cutoff must be >= 1");
    const auto runs = read_run(run_path);
    if (runs.empty()) warn("run file " + run_path + " is empty; writing an empty submission");
    write_text(output, format_submission(runs, *cutoff));
    return 0;
}

struct SynthArgs {
    std::string output;
    SyntheticOptions options;
    std::optional<std::size_t> queries;
};

int cmd_synth(SynthArgs args) {
    args.options.query_count = args.queries;
    const auto synthetic = generate_synthetic_collection(args.options);
    fs::create_directories(args.output);
    write_collection(synthetic.collection, args.output);

    std::string titles;
    for (const auto& t : synthetic.statute_titles) titles += t + '\n';
    write_text(fs::path(args.output) / "titles.txt", titles);

    std::string plants = "# case_id\tpassage_index\tstatute_id\tsection\tfamily\n";
    for (const auto& p : synthetic.plants) {
        plants += p.case_id + '\t' + std::to_string(p.passage_index) + '\t' + p.statute_id + '\t' + p.section + '\t' +
                  (p.family ? "1" : "0") + '\n';
    }
    write_text(fs::path(args.output) / "plants.tsv", plants);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lexical legal case retrieval: statute extraction, indexing, passage fusion, tuning and evaluation"};
    app.require_subcommand(1);
    bool serial = false;
    bool quiet = false;
    app.add_flag("--serial", serial, "run every kernel on one thread");
    app.add_flag("-q,--quiet", quiet, "suppress warnings");

    std::string corpus, output, titles, run_path, qrels_path;
    std::optional<std::string> qrels, queries, config;

    auto* stats = app.add_subcommand("stats", "collection statistics as JSON");
    stats->add_option("corpus", corpus, "directory of case files")->required();
    stats->add_option("--qrels", qrels, "qrels TSV");
    stats->add_option("--queries", queries, "query id list");

    auto* annotate = app.add_subcommand("annotate", "extract statute section references per passage");
    annotate->add_option("corpus", corpus)->required();
    annotate->add_option("--titles", titles, "statute title catalog")->required();
    annotate->add_option("-o,--output", output, "annotation TSV")->required();

    IndexArgs index_args;
    auto* index = app.add_subcommand("index", "build a document or passage index");
    index->add_option("corpus", index_args.corpus)->required();
    index->add_option("--titles", index_args.titles, "statute title catalog; enables the statute field");
    index->add_option("--annotations", index_args.annotations, "precomputed annotations for --titles");
    index->add_option("--granularity", index_args.granularity, "document|passage");
    index->add_option("-o,--output", index_args.output, "index file")->required();
    index_args.params.attach(index);

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "retrieve notice cases for query cases (TREC run)");
    search->add_option("index", search_args.index)->required();
    search->add_option("corpus", search_args.corpus)->required();
    search->add_option("--queries", search_args.queries, "query id list");
    search->add_option("--qrels", search_args.qrels, "qrels TSV (its queries are used without --queries)");
    search->add_option("-o,--output", search_args.output, "run file")->required();
    search->add_option("--tag", search_args.tag, "run tag column");
    search_args.params.attach(search);

    std::size_t max_rank = 100;
    auto* eval = app.add_subcommand("eval", "micro P/R/F1 at every rank and the F1-optimal cutoff");
    eval->add_option("run", run_path)->required();
    eval->add_option("qrels", qrels_path)->required();
    eval->add_option("--max-rank", max_rank, "deepest cutoff");
    eval->add_option("--queries", queries, "evaluate exactly these queries (missing ones count as empty)");
    auto* eval_out = eval->add_option("-o,--output", output, "metrics TSV");

    TuneArgs tune_args;
    auto* tune = app.add_subcommand("tune", "random search on the training split, evaluated on dev");
    tune->add_option("index", tune_args.index)->required();
    tune->add_option("corpus", tune_args.corpus)->required();
    tune->add_option("qrels", tune_args.qrels)->required();
    tune->add_option("--queries", tune_args.queries, "query order (default: lexicographic)");
    tune->add_option("--trials", tune_args.trials, "number of random trials");
    tune->add_option("--seed", tune_args.seed, "sampling seed");
    tune->add_option("--train-count", tune_args.train_count, "queries in the training split");
    tune->add_option("--log", tune_args.log, "JSON-lines trial log");
    tune->add_option("--resume", tune_args.resume, "trial log to reuse")->check(CLI::ExistingFile);
    tune->add_option("--best-config", tune_args.best_config, "where to write the best configuration");
    tune->add_flag("--no-statute", tune_args.no_statute, "pin P_b=1 and s_b=0");
    tune_args.params.attach(tune);

    std::optional<std::size_t> cutoff;
    auto* submit = app.add_subcommand("submit", "competition format: query_id<TAB>case_id for the top k");
    submit->add_option("run", run_path)->required();
    submit->add_option("--cutoff", cutoff, "rows kept per query");
    submit->add_option("--config", config, "config file holding cutoff=");
    submit->add_option("-o,--output", output, "submission file")->required();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "write a synthetic labeled collection");
    synth->add_option("output", synth_args.output)->required();
    synth->add_option("--seed", synth_args.options.seed);
    synth->add_option("--cases", synth_args.options.n_cases);
    synth->add_option("--vocab", synth_args.options.vocab_size);
    synth->add_option("--density", synth_args.options.statute_density, "statute density in [0, 1]");
    synth->add_option("--queries", synth_args.queries, "number of query cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    set_warnings_enabled(!quiet);
    const auto exec = serial ? Execution::serial : Execution::parallel;

    try {
        if (stats->parsed()) return cmd_stats(corpus, qrels, queries);
        if (annotate->parsed()) return cmd_annotate(corpus, titles, output, exec);
        if (index->parsed()) return cmd_index(index_args, exec);
        if (search->parsed()) return cmd_search(search_args, exec);
        if (eval->parsed()) {
            return cmd_eval(run_path, qrels_path, max_rank, queries,
                            eval_out->count() ? std::optional<std::string>(output) : std::nullopt);
        }
        if (tune->parsed()) return cmd_tune(tune_args, exec);
        if (submit->parsed()) return cmd_submit(run_path, cutoff, config, output);
        if (synth->parsed()) return cmd_synth(synth_args);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}
