// Acceptance suite. One line per criterion: "[PASS] n name: detail" or
// "[FAIL] ...". Exit status is the number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../common/oracles.hpp"
#include "lexcourt/config.hpp"
#include "lexcourt/eval.hpp"
#include "lexcourt/index.hpp"
#include "lexcourt/retrieval.hpp"
#include "lexcourt/runfile.hpp"
#include "lexcourt/statutes.hpp"
#include "lexcourt/synthetic.hpp"

using namespace lexcourt;
namespace fs = std::filesystem;

namespace {

constexpr double kScoreTolerance = 1e-9;
constexpr double kFusionTolerance = 1e-12;
constexpr double kMetricTolerance = 1e-12;
constexpr double kOracleSeconds = 5.0;
constexpr double kTrendSeconds = 60.0;
constexpr double kRecallKeep = 0.9;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail.clear();
        if (!detail.empty()) detail += "; ";
        detail += why;
        pass = false;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult cli(const std::string& args) {
    const std::string cmd = std::string(LEXCOURT_CLI) + " -q " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

class Scratch {
  public:
    explicit Scratch(const std::string& tag)
        : path_(fs::temp_directory_path() / ("lexcourt_acc_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~Scratch() { fs::remove_all(path_); }
    fs::path operator/(const std::string& s) const { return path_ / s; }

  private:
    fs::path path_;
};

Outcome scorer_oracle() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto syn = generate_synthetic_collection(17, 10, 300, 1.0);
    const auto catalog = StatuteCatalog::from_titles(syn.statute_titles);
    const auto ann = annotate_collection(syn.collection, catalog);
    IndexBuildOptions opt;
    opt.catalog = catalog;
    const auto idx = Index::build(syn.collection, &ann, opt);
    const oracle::ExhaustiveScorer naive(syn.collection, &ann, idx.pipeline());
    if (idx.unit_count() > 100) o.fail("corpus has " + std::to_string(idx.unit_count()) + " passages");

    std::mt19937_64 rng(2);
    const auto& vocab = idx.field(Field::body).terms();
    const auto& statute_vocab = idx.field(Field::statute).terms();
    std::size_t compared = 0;
    double worst = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::string> terms, st;
        for (int i = 0; i < 6; ++i) terms.push_back(vocab[rng() % vocab.size()]);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        if (!statute_vocab.empty()) st.push_back(statute_vocab[rng() % statute_vocab.size()]);
        const double sb = iter % 2 ? 1.5 : 0.0;
        for (auto kind : {Scorer::bm25, Scorer::lm_jm}) {
            ScorerParams sp;
            sp.scorer = kind;
            const auto expected = naive.score_all(terms, st, sp, sb);
            const auto actual = search_units(idx, terms, st, sp, sb, 20);
            if (actual.size() != std::min<std::size_t>(20, expected.size())) {
                o.fail("length mismatch at query " + std::to_string(iter));
                continue;
            }
            for (std::size_t i = 0; i < actual.size(); ++i) {
                if (actual[i].unit != expected[i].unit) o.fail("order differs at query " + std::to_string(iter));
                worst = std::max(worst, std::abs(actual[i].score - expected[i].score));
            }
            compared += actual.size();
        }
    }
    if (worst > kScoreTolerance) o.fail("score error " + fmt(worst));
    const double secs = seconds_since(t0);
    if (secs >= kOracleSeconds) o.fail("took " + fmt(secs) + "s");
    if (o.pass) {
        o.detail = std::to_string(idx.unit_count()) + " passages, " + std::to_string(compared) +
                   " results, max error " + fmt(worst) + ", " + fmt(secs) + "s";
    }
    return o;
}

Outcome fusion_fidelity() {
    Outcome o;
    auto fuse = [](const std::vector<std::vector<std::string>>& rankings, const std::vector<double>& boosts) {
        std::vector<FusionInput> in;
        for (std::size_t i = 0; i < rankings.size(); ++i) {
            FusionInput f;
            for (const auto& c : rankings[i]) f.case_ids.push_back(c);
            f.boost = boosts[i];
            in.push_back(std::move(f));
        }
        return rrf_fuse(in, 60.0);
    };

    const auto a = fuse({{"A", "B"}, {"A"}}, {1.0, 1.0});
    if (a.empty() || a[0].case_id != "A" || std::abs(a[0].score - 2.0 / 61.0) > kFusionTolerance) o.fail("2/61 case");
    const auto b = fuse({{"X", "A"}}, {3.0});
    if (b.size() != 2 || b[1].case_id != "A" || std::abs(b[1].score - 3.0 / 62.0) > kFusionTolerance) {
        o.fail("3/62 case");
    }

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> boost(1.0, 10.0);
    const int instances = 500;
    double worst = 0.0;
    for (int iter = 0; iter < instances; ++iter) {
        std::vector<std::vector<std::string>> rankings;
        std::vector<double> boosts;
        const auto n = 1 + rng() % 5;
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<std::string> ranking;
            const auto len = 1 + rng() % 20;
            for (std::size_t i = 0; i < len; ++i) ranking.push_back("c" + std::to_string(rng() % 20));
            rankings.push_back(ranking);
            boosts.push_back(boost(rng));
        }
        const auto direct = oracle::rrf_direct(rankings, boosts, 60.0);
        const auto fused = fuse(rankings, boosts);
        if (fused.size() != direct.size()) {
            o.fail("case set differs at instance " + std::to_string(iter));
            continue;
        }
        for (std::size_t i = 0; i < fused.size(); ++i) {
            const auto it = direct.find(fused[i].case_id);
            if (it == direct.end()) {
                o.fail("unexpected case at instance " + std::to_string(iter));
                break;
            }
            worst = std::max(worst, std::abs(it->second - fused[i].score));
            if (i > 0 && !(fused[i - 1].score > fused[i].score ||
                           (fused[i - 1].score == fused[i].score && fused[i - 1].case_id < fused[i].case_id))) {
                o.fail("order at instance " + std::to_string(iter));
            }
        }
    }
    if (worst > kFusionTolerance) o.fail("max error " + fmt(worst));
    if (o.pass) o.detail = std::to_string(instances) + " instances + 2 hand cases, max error " + fmt(worst);
    return o;
}

Outcome statute_degeneracy() {
    Outcome o;
    const auto syn = generate_synthetic_collection(7, 200, 4000, 0.8);
    const auto catalog = StatuteCatalog::from_titles(syn.statute_titles);
    const auto ann = annotate_collection(syn.collection, catalog);
    IndexBuildOptions with;
    with.catalog = catalog;
    const auto statute_idx = Index::build(syn.collection, &ann, with);
    const auto plain_idx = Index::build(syn.collection, nullptr, IndexBuildOptions{});
    const auto& queries = syn.collection.query_order;

    std::size_t checked = 0;
    for (auto kind : {Scorer::lm_jm, Scorer::bm25}) {
        RetrievalConfig cfg;
        cfg.scorer.scorer = kind;
        cfg.fusion.statute_boost = 0.0;
        cfg.fusion.passage_boost = 1.0;
        const auto a = format_run(run_queries(statute_idx, syn.collection, queries, cfg), "lexcourt");
        const auto b = format_run(run_queries(plain_idx, syn.collection, queries, cfg), "lexcourt");
        if (a != b) o.fail(std::string(to_string(kind)) + " run files differ");
        if (a.empty()) o.fail("empty run");
        checked += a.size();
    }
    if (o.pass) o.detail = std::to_string(queries.size()) + " queries, " + std::to_string(checked) + " bytes identical";
    return o;
}

Outcome statute_extraction() {
    const std::string irpa = "immigration_and_refugee_protection_act";
    const std::string fca = "federal_courts_act";
    const std::string rules = "federal_courts_rules";
    const std::string ita = "income_tax_act";
    const std::string unk(kUnknownStatute);

    const auto catalog = StatuteCatalog::from_titles({"Immigration and Refugee Protection Act (S.C. 2001, c. 27)",
                                                      "Federal Courts Act (R.S.C., 1985, c. F-7)",
                                                      "Federal Courts Rules (SOR/98-106)",
                                                      "Income Tax Act (R.S.C., 1985, c. 1 (5th Supp.))"});
    Collection col;
    auto add = [&](const std::string& id, const std::string& text) { col.cases.emplace(id, make_case(id, text)); };
    add("c01", "The applicant relies on section 96 of the Immigration and Refugee Protection Act.\n\n"
               "The panel rejected the claim.");
    add("c02", "Under IRPA s. 97 the risk was assessed.\n\nThe Board considered s. 97 again.");
    add("c03", "Judicial review lies under section 18.1(4) of the FCA.\n\nNothing further.");
    add("c04", "IRPA section 72 governs.\n\nIRPA s. 72 applies here.\n\nThe Federal Courts Act and section 72.");
    add("c05", "IRPA section 5.\n\nFederal Courts Act s. 5.");
    add("c06", "The claim under section 12 failed.");
    add("c07", "Income Tax Act s. 152 and section 3.\n\nNo cues in 1985.");
    add("c08", "The Federal Courts Rules, s. 55, govern the motion.");
    add("c09", "The Immigration and Refugee Protection Act was argued.\n\nThe tribunal cited section 96.");
    add("c10", "the irpa s. 40 and IRPAX section 41.");
    col.query_order = {};

    std::map<PassageKey, std::vector<StatuteSectionRef>> expected{
        {{"c01", 0}, {{irpa, "96"}}},
        {{"c02", 0}, {{irpa, "97"}}},
        {{"c02", 1}, {{irpa, "97"}}},
        {{"c03", 0}, {{fca, "18.1(4)"}}},
        {{"c04", 0}, {{irpa, "72"}}},
        {{"c04", 1}, {{irpa, "72"}}},
        {{"c04", 2}, {{irpa, "72"}}},
        {{"c05", 0}, {{fca, "5"}}},
        {{"c05", 1}, {{fca, "5"}}},
        {{"c06", 0}, {{unk, "12"}}},
        {{"c07", 0}, {{ita, "152"}, {ita, "3"}}},
        {{"c08", 0}, {{rules, "55"}}},
        {{"c09", 1}, {{unk, "96"}}},
        {{"c10", 0}, {{unk, "40"}, {unk, "41"}}},
    };

    Outcome o;
    const auto ann = annotate_collection(col, catalog);
    for (const auto& [key, refs] : expected) {
        if (ann.refs_for(key) != refs) o.fail(key.case_id + "#" + std::to_string(key.passage_index));
    }
    for (const auto& [key, refs] : ann.refs) {
        if (!expected.count(key)) o.fail("unexpected " + key.case_id + "#" + std::to_string(key.passage_index));
    }
    if (annotate_collection(col, catalog, Execution::serial) != ann) o.fail("serial and parallel differ");
    if (o.pass) o.detail = "10 cases, " + std::to_string(expected.size()) + " annotated passages match";
    return o;
}

Outcome metrics_oracle() {
    Outcome o;
    {
        Qrels qrels{{"q", {"r1", "r2", "r3", "r4"}}};
        CaseRanking run{"q", {}};
        const char* ids[] = {"x1", "r1", "x2", "x3", "r2", "x4", "x5", "x6", "r3", "x7"};
        for (int i = 0; i < 10; ++i) run.results.push_back({ids[i], 10.0 - i});
        const std::vector<CaseRanking> runs{run};
        const auto m = metrics_at_ranks(runs, qrels, 10);
        if (m.size() != 10 || m[7].precision != 0.25 || m[7].recall != 0.5 || m[7].f1 != 1.0 / 3.0) {
            o.fail("hand example");
        }
    }

    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
        Qrels qrels;
        std::vector<CaseRanking> runs;
        const auto nq = 1 + rng() % 12;
        for (std::size_t qi = 0; qi < nq; ++qi) {
            const auto qid = "q" + std::to_string(qi);
            auto& rel = qrels[qid];
            const auto nrel = 1 + rng() % 6;
            while (rel.size() < nrel) rel.insert("c" + std::to_string(rng() % 40));
            CaseRanking r{qid, {}};
            std::vector<int> pool(40);
            std::iota(pool.begin(), pool.end(), 0);
            std::shuffle(pool.begin(), pool.end(), rng);
            const auto len = rng() % 41;
            for (std::size_t i = 0; i < len; ++i) r.results.push_back({"c" + std::to_string(pool[i]), 1.0 / (i + 1.0)});
            runs.push_back(std::move(r));
        }
        const std::size_t max_rank = 1 + rng() % 50;
        const auto m = metrics_at_ranks(runs, qrels, max_rank);
        if (m.size() != max_rank) {
            o.fail("row count at instance " + std::to_string(iter));
            continue;
        }
        for (std::size_t k = 1; k <= max_rank; ++k) {
            const auto c = oracle::counts_at(runs, qrels, k);
            const auto& row = m[k - 1];
            if (row.k != k || row.true_positives != c.tp || row.retrieved != c.retrieved || row.relevant != c.relevant) {
                o.fail("counts at instance " + std::to_string(iter) + " k=" + std::to_string(k));
                break;
            }
            const double p = c.retrieved ? static_cast<double>(c.tp) / c.retrieved : 0.0;
            const double r = c.relevant ? static_cast<double>(c.tp) / c.relevant : 0.0;
            const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
            worst = std::max({worst, std::abs(p - row.precision), std::abs(r - row.recall), std::abs(f - row.f1)});
        }
    }
    if (worst > kMetricTolerance) o.fail("max error " + fmt(worst));
    if (o.pass) o.detail = "50 instances + hand example, max error " + fmt(worst);
    return o;
}

Outcome retrieval_trends() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto syn = generate_synthetic_collection(7, 200, 4000, 0.8);
    const auto& col = syn.collection;
    const auto catalog = StatuteCatalog::from_titles(syn.statute_titles);
    const auto ann = annotate_collection(col, catalog);

    IndexBuildOptions passage_opt;
    passage_opt.catalog = catalog;
    const auto passage_idx = Index::build(col, &ann, passage_opt);
    IndexBuildOptions doc_opt;
    doc_opt.granularity = Granularity::document;
    const auto doc_idx = Index::build(col, nullptr, doc_opt);

    auto best = [&](const Index& idx, const ExperimentConfig& cfg) {
        const auto runs = run_queries(idx, col, col.query_order, cfg.retrieval());
        return metrics_at_ranks(runs, col.qrels);
    };

    ExperimentConfig doc_cfg;
    const auto doc_m = best(doc_idx, doc_cfg);
    const auto doc_k = select_cutoff(doc_m);

    ExperimentConfig passage_cfg;
    passage_cfg.passage_depth = 10;
    const auto passage_m = best(passage_idx, passage_cfg);
    const auto passage_k = select_cutoff(passage_m);

    ExperimentConfig statute_cfg = passage_cfg;
    statute_cfg.statute_boost = 2.0;
    statute_cfg.passage_boost = 1.0;
    const auto statute_m = best(passage_idx, statute_cfg);

    const auto& d = metrics_at(doc_m, doc_k);
    const auto& p = metrics_at(passage_m, passage_k);
    const auto& s = metrics_at(statute_m, passage_k);
    if (p.f1 < d.f1) o.fail("passage F1 " + fmt(p.f1) + " < document F1 " + fmt(d.f1));
    if (s.precision < p.precision) o.fail("statute precision " + fmt(s.precision) + " < " + fmt(p.precision));
    if (s.recall < kRecallKeep * p.recall) o.fail("statute recall " + fmt(s.recall) + " < 0.9 x " + fmt(p.recall));
    const double secs = seconds_since(t0);
    if (secs >= kTrendSeconds) o.fail("took " + fmt(secs) + "s");
    std::string detail = "doc F1 " + fmt(d.f1) + "@" + std::to_string(doc_k) + ", passage F1 " + fmt(p.f1) + "@" +
                         std::to_string(passage_k) + ", statute P/R " + fmt(s.precision) + "/" + fmt(s.recall) +
                         " vs " + fmt(p.precision) + "/" + fmt(p.recall) + ", " + fmt(secs) + "s";
    o.detail = o.pass ? detail : o.detail + " (" + detail + ")";
    return o;
}

Outcome determinism() {
    Outcome o;
    Scratch dir("det");
    if (cli("synth " + q(dir / "s") + " --seed 5 --cases 150 --vocab 2000").status != 0) {
        o.fail("synth failed");
        return o;
    }
    const auto cases = q(dir / "s/cases");
    const auto qrels = q(dir / "s/qrels.tsv");
    const auto titles = q(dir / "s/titles.txt");
    auto twice = [&](const std::string& name, const std::function<std::string(const std::string&)>& args,
                     const std::function<fs::path(const std::string&)>& output) {
        std::string outs[2];
        for (int i = 0; i < 2; ++i) {
            const auto tag = std::to_string(i);
            const auto r = cli(args(tag));
            if (r.status != 0) {
                o.fail(name + " exited " + std::to_string(r.status));
                return;
            }
            outs[i] = read_file(output(tag)) + r.out;
        }
        if (outs[0] != outs[1] || outs[0].empty()) o.fail(name + " output differs");
    };
    twice("index", [&](const std::string& t) { return "index " + cases + " --titles " + titles + " -o " + q(dir / ("i" + t + ".idx")); },
          [&](const std::string& t) { return dir / ("i" + t + ".idx"); });
    twice("search",
          [&](const std::string& t) {
              return "search " + q(dir / "i0.idx") + " " + cases + " --qrels " + qrels + " --sb 1 --Pb 2 -o " +
                     q(dir / ("r" + t + ".txt"));
          },
          [&](const std::string& t) { return dir / ("r" + t + ".txt"); });
    twice("tune",
          [&](const std::string& t) {
              return "tune " + q(dir / "i0.idx") + " " + cases + " " + qrels + " --trials 4 --seed 3 --train-count 20 --log " +
                     q(dir / ("t" + t + ".jsonl")) + " --best-config " + q(dir / ("b" + t + ".cfg"));
          },
          [&](const std::string& t) { return dir / ("t" + t + ".jsonl"); });
    if (read_file(dir / "b0.cfg") != read_file(dir / "b1.cfg")) o.fail("tune best config differs");
    twice("eval",
          [&](const std::string& t) {
              return "eval " + q(dir / "r0.txt") + " " + qrels + " -o " + q(dir / ("m" + t + ".tsv"));
          },
          [&](const std::string& t) { return dir / ("m" + t + ".tsv"); });
    if (o.pass) o.detail = "index, search, tune and eval byte-identical across two runs";
    return o;
}

Outcome protocol_shape() {
    Outcome o;
    Scratch dir("shape");
    if (cli("synth " + q(dir / "s") + " --seed 8 --cases 2000 --queries 898 --vocab 4000").status != 0) {
        o.fail("synth failed");
        return o;
    }
    const auto cases = q(dir / "s/cases");
    const auto qrels = q(dir / "s/qrels.tsv");
    if (cli("index " + cases + " -o " + q(dir / "p.idx")).status != 0) {
        o.fail("index failed");
        return o;
    }
    const auto tune = cli("tune " + q(dir / "p.idx") + " " + cases + " " + qrels +
                          " --trials 1 --seed 1 --train-count 700 --log " + q(dir / "t.jsonl") + " --best-config " +
                          q(dir / "b.cfg"));
    std::size_t dev = 0, train = 0;
    double k_rrf = 0.0;
    if (tune.status != 0) {
        o.fail("tune exited " + std::to_string(tune.status));
    } else {
        try {
            const auto j = nlohmann::json::parse(tune.out);
            dev = j.at("dev_queries").get<std::size_t>();
            train = j.at("train_queries").get<std::size_t>();
            k_rrf = j.at("k_rrf").get<double>();
        } catch (const std::exception& e) {
            o.fail(std::string("tune output: ") + e.what());
        }
    }
    if (train != 700 || dev != 198) o.fail("train/dev " + std::to_string(train) + "/" + std::to_string(dev));
    if (k_rrf != 60.0 || ExperimentConfig{}.k_rrf != 60.0 || FusionParams{}.k_rrf != 60.0) o.fail("k_rrf default");

    const auto deep = cli("search " + q(dir / "p.idx") + " " + cases + " --qrels " + qrels + " --depth 101 -o " +
                          q(dir / "deep.txt"));
    if (deep.status != 2) o.fail("--depth 101 exited " + std::to_string(deep.status));
    if (cli("search " + q(dir / "p.idx") + " " + cases + " --qrels " + qrels + " -o " + q(dir / "r.txt")).status != 0) {
        o.fail("search failed");
    } else {
        std::size_t longest = 0;
        for (const auto& r : read_run(dir / "r.txt")) longest = std::max(longest, r.results.size());
        if (longest > kMaxCaseResults) o.fail(std::to_string(longest) + " rows for one query");
        if (o.pass) {
            o.detail = "898 queries -> " + std::to_string(train) + " train / " + std::to_string(dev) +
                       " dev, longest ranking " + std::to_string(longest) + ", --depth 101 rejected, k_rrf 60";
        }
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"scorer oracle equivalence", scorer_oracle},
        {"fusion fidelity", fusion_fidelity},
        {"statute degeneracy", statute_degeneracy},
        {"statute extraction fidelity", statute_extraction},
        {"metrics oracle", metrics_oracle},
        {"passage and statute trends", retrieval_trends},
        {"determinism", determinism},
        {"protocol shape", protocol_shape},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ' ' << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed;
}
