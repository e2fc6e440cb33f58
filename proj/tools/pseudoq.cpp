// Command-line front end: index, neighbors, cluster, run, sweep, eval.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "pseudoq/clustering.hpp"
#include "pseudoq/corpus.hpp"
#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"
#include "pseudoq/eval.hpp"
#include "pseudoq/experiment.hpp"
#include "pseudoq/lm.hpp"
#include "pseudoq/parallel.hpp"
#include "pseudoq/trec.hpp"

namespace fs = std::filesystem;
using namespace pseudoq;

namespace {

// A directory stands for every regular file below it, in path order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (!fs::is_directory(p)) {
            files.push_back(p);
            continue;
        }
        std::vector<std::string> found;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file()) found.push_back(e.path().string());
        std::sort(found.begin(), found.end());
        if (found.empty()) throw DataError("directory '" + p + "' holds no files");
        files.insert(files.end(), found.begin(), found.end());
    }
    return files;
}

std::vector<RawDocument> read_documents(const std::vector<std::string>& paths, const std::string& format) {
    std::vector<RawDocument> docs;
    for (const auto& p : expand_inputs(paths)) {
        const std::string data = read_file(p);
        auto part = format == "lines" ? parse_lines(data) : parse_trec(data);
        docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return docs;
}

Corpus build(const std::vector<std::string>& inputs, const std::string& format, Stemmer stemmer,
             const std::string& stoplist, bool drop_short) {
    PreprocessOptions opts;
    opts.stemmer = stemmer;
    opts.drop_length_one = drop_short;
    if (!stoplist.empty()) opts.stoplist = load_stoplist(stoplist);
    auto result = build_corpus(read_documents(inputs, format), opts);
    if (!result.excluded.empty())
        diagnostic(std::to_string(result.excluded.size()) + " documents were empty after preprocessing and excluded");
    return std::move(result.corpus);
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream out;
    fn(out);
    return out.str();
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

// ---- index / neighbors / cluster -------------------------------------------

struct IndexArgs {
    std::vector<std::string> inputs;
    std::string output;
    std::string format = "trec";
    std::string stemmer = "none";
    std::string stoplist;
    bool drop_short = false;
};

void cmd_index(const IndexArgs& a) {
    Corpus corpus = build(a.inputs, a.format, parse_stemmer(a.stemmer), a.stoplist, a.drop_short);
    write_file_atomic(a.output, render([&](std::ostream& o) { save_index(corpus, o); }));
    std::cout << corpus.size() << " documents, " << corpus.vocabulary_size() << " terms, "
              << corpus.collection_length() << " tokens\n";
}

struct NeighborArgs {
    std::string index;
    std::string output;
    double mu = 2000;
    std::size_t k_max = 100;
};

void cmd_neighbors(const NeighborArgs& a, unsigned threads) {
    const Corpus corpus = load_index(a.index);
    const auto table = precompute_neighbors(corpus, a.k_max, a.mu, threads);
    write_file_atomic(a.output, render([&](std::ostream& o) { save_neighbors(table, o); }));
    std::cout << table.lists.size() << " neighbor lists, k_max " << table.k_max << "\n";
}

struct ClusterArgs {
    std::string index;
    std::string neighbors;
    std::string output;
    double mu = 2000;
    std::size_t delta = 40;
};

void cmd_cluster(const ClusterArgs& a, unsigned threads) {
    const Corpus corpus = load_index(a.index);
    auto in = open(a.neighbors);
    const auto table = load_neighbors(in, corpus, a.mu);
    const auto index = build_clusters(corpus, table, a.delta, threads);
    write_file_atomic(a.output, render([&](std::ostream& o) { save_clusters(index, o); }));
    std::cout << index.size() << " clusters of size " << a.delta << ", " << count_self_members(index)
              << " contain their seed\n";
}

// ---- run / sweep -------------------------------------------------------------

struct RunArgs {
    std::string config;
    std::string index;      // optional prebuilt index
    std::string neighbors;  // optional prebuilt neighbor table
};

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).lexically_normal().string();
}

void cmd_run(const RunArgs& a, unsigned threads, bool sweep) {
    const fs::path base = fs::path(a.config).parent_path();
    ExperimentSpec spec = parse_experiment(read_file(a.config));
    if (spec.systems.empty()) throw ConfigError("the experiment defines no [system] sections");
    if (sweep && spec.qrels.empty()) throw ConfigError("sweep needs qrels");
    for (auto& c : spec.corpus) c = resolve(base, c);
    spec.topics = resolve(base, spec.topics);
    spec.qrels = resolve(base, spec.qrels);
    spec.output = resolve(base, spec.output);
    spec.stoplist = resolve(base, spec.stoplist);

    const Corpus corpus = a.index.empty() ? build(spec.corpus, spec.format, spec.stemmer, spec.stoplist, false)
                                          : load_index(a.index);
    const DocumentRenderers renderers(corpus, spec.mu);

    std::vector<SystemPoint> points;
    for (const auto& s : spec.systems) {
        auto p = expand_grid(spec, s);
        points.insert(points.end(), p.begin(), p.end());
    }

    // Neighbor lists serve document pseudo-queries and cluster construction.
    std::size_t k_max = 0;
    std::set<std::size_t> deltas;
    for (const auto& p : points) {
        if (p.kind == SystemKind::mccluster) {
            deltas.insert(p.run.delta);
            k_max = std::max(k_max, p.run.delta);
        }
        if ((p.kind == SystemKind::vdoc || p.kind == SystemKind::mcdoc) && p.run.rounds > 1)
            k_max = std::max({k_max, p.run.alpha, p.run.effective_m()});
    }
    k_max = std::min(k_max, corpus.size());
    NeighborTable table;
    if (!a.neighbors.empty()) {
        auto in = open(a.neighbors);
        table = load_neighbors(in, corpus, spec.mu);
    } else if (k_max > 0) {
        table = precompute_neighbors(corpus, k_max, spec.mu, threads);
    }
    const RendererLookup lookup(renderers, k_max > 0 || !a.neighbors.empty() ? &table : nullptr);
    std::map<std::size_t, ClusterIndex> clusters;
    for (auto d : deltas) {
        if (d > table.k_max)
            throw ArtifactMismatch("neighbor table k_max=" + std::to_string(table.k_max) + " is below delta=" +
                                   std::to_string(d));
        clusters.emplace(d, build_clusters(corpus, table, d, threads));
    }

    std::vector<Query> queries;
    for (const auto& t : parse_topics(read_file(spec.topics))) {
        try {
            queries.push_back(make_query(corpus, t.id, t.title));
        } catch (const DataError& e) {
            diagnostic("topic " + t.id + " skipped: " + e.what());
        }
    }
    if (queries.empty()) throw DataError("no topic yields a non-empty query");

    fs::create_directories(spec.output);
    const ExperimentContext ctx{corpus, lookup, clusters};
    std::vector<std::pair<std::string, RunRankings>> runs;
    for (const auto& p : points) {
        const auto rankings = run_point(p, queries, ctx, threads);
        const std::string text = format_run(corpus, queries, rankings, p.tag());
        const std::string file = (fs::path(spec.output) / (p.stem() + ".run")).string();
        write_file_atomic(file, text);
        runs.push_back({p.stem(), parse_run(text)});
        std::cout << "wrote " << file << "  [" << p.label() << "]\n";
    }

    if (spec.qrels.empty()) return;
    const auto report = evaluate(parse_qrels(read_file(spec.qrels)), runs, spec.depth);
    const std::string table_text = format_report(report);
    write_file_atomic((fs::path(spec.output) / "report.txt").string(), table_text);
    std::cout << table_text;

    if (!sweep) return;
    std::string csv = "system,point,alpha1,map,recall\n";
    char buf[128];
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& s = report.systems[i];
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.6f,%.6f\n", points[i].index, points[i].run.alpha1, s.map,
                      s.micro_recall);
        csv += points[i].system + buf;
    }
    const std::string file = (fs::path(spec.output) / "sweep.csv").string();
    write_file_atomic(file, csv);
    std::cout << "wrote " << file << "\n";
}

// ---- eval --------------------------------------------------------------------

struct EvalArgs {
    std::string qrels;
    std::vector<std::string> runs;
    std::size_t depth = 1000;
};

void cmd_eval(const EvalArgs& a) {
    std::vector<std::pair<std::string, RunRankings>> runs;
    for (const auto& r : a.runs) runs.push_back({fs::path(r).stem().string(), parse_run(read_file(r))});
    std::cout << format_report(evaluate(parse_qrels(read_file(a.qrels)), runs, a.depth));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudoq: iterative pseudo-query retrieval over document and cluster language models"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = default_thread_count();
    app.add_option("--threads", threads, "Worker threads (default: PSEUDOQ_THREADS or hardware concurrency)")
        ->check(CLI::PositiveNumber);
    app.footer(describe_run_defaults());

    IndexArgs ia;
    auto* index = app.add_subcommand("index", "Tokenize and index a collection");
    index->add_option("inputs", ia.inputs, "Collection files")->required();
    index->add_option("-o,--output", ia.output, "Index file to write")->required();
    index->add_option("--format", ia.format, "trec or lines")->check(CLI::IsMember({"trec", "lines"}));
    index->add_option("--stemmer", ia.stemmer, "none or porter");
    index->add_option("--stoplist", ia.stoplist, "Whitespace-separated stopword file");
    index->add_flag("--drop-short", ia.drop_short, "Drop one-character tokens");

    NeighborArgs na;
    auto* neighbors = app.add_subcommand("neighbors", "Precompute each document's top document renderers");
    neighbors->add_option("--index", na.index, "Index file")->required();
    neighbors->add_option("-o,--output", na.output, "Neighbor table to write")->required();
    neighbors->add_option("--mu", na.mu, "Dirichlet smoothing")->check(CLI::PositiveNumber);
    neighbors->add_option("--k-max", na.k_max, "Renderers kept per document")->check(CLI::PositiveNumber);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "Build nearest-neighbor clusters from a neighbor table");
    cluster->add_option("--index", ca.index, "Index file")->required();
    cluster->add_option("--neighbors", ca.neighbors, "Neighbor table")->required();
    cluster->add_option("-o,--output", ca.output, "Cluster file to write")->required();
    cluster->add_option("--mu", ca.mu, "Dirichlet smoothing")->check(CLI::PositiveNumber);
    cluster->add_option("--delta", ca.delta, "Cluster size")->check(CLI::PositiveNumber);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Run every system of an experiment and evaluate");
    auto* sweep = app.add_subcommand("sweep", "Like run, and also write sweep.csv (alpha1, MAP, recall)");
    for (auto* sub : {run, sweep}) {
        sub->add_option("config", ra.config, "Experiment file")->required();
        sub->add_option("--index", ra.index, "Use a prebuilt index instead of the corpus files");
        sub->add_option("--neighbors", ra.neighbors, "Use a prebuilt neighbor table");
        sub->footer(describe_run_defaults());
    }

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Evaluate TREC run files against qrels");
    eval->add_option("--qrels", ea.qrels, "Qrels file")->required();
    eval->add_option("--depth", ea.depth, "Evaluation depth N")->check(CLI::PositiveNumber);
    eval->add_option("runs", ea.runs, "Run files; the first is the significance reference")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*index) cmd_index(ia);
        else if (*neighbors) cmd_neighbors(na, threads);
        else if (*cluster) cmd_cluster(ca, threads);
        else if (*run) cmd_run(ra, threads, false);
        else if (*sweep) cmd_run(ra, threads, true);
        else if (*eval) cmd_eval(ea);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
