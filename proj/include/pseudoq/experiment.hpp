#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pseudoq/baselines.hpp"
#include "pseudoq/clustering.hpp"
#include "pseudoq/corpus.hpp"
#include "pseudoq/eval.hpp"
#include "pseudoq/pipeline.hpp"

namespace pseudoq {

enum class SystemKind { vdoc, mcdoc, mccluster, lm, rocchio, rm };

std::string_view to_string(SystemKind k);
SystemKind parse_system_kind(std::string_view name);

/// One `[system NAME]` section: every key maps to one or more values; a
/// system with several values per key expands into their cartesian product.
struct SystemSpec {
    std::string name;
    std::map<std::string, std::vector<std::string>> grid;

    bool operator==(const SystemSpec&) const = default;
};

/// Line-oriented experiment description:
///
///   corpus = a.trec, b.trec
///   topics = topics.trec
///   [system mcdoc]
///   method = mcdoc
///   alpha1 = 5, 10, 20
///
/// Paths are kept as written; callers resolve them against the file's
/// directory.
struct ExperimentSpec {
    std::vector<std::string> corpus;
    std::string format = "trec";  // trec | lines
    std::string topics;
    std::string qrels;            // optional
    std::string output = "runs";
    std::string stoplist;         // optional
    Stemmer stemmer = Stemmer::none;
    double mu = 2000;
    std::size_t depth = 1000;     // N
    std::vector<SystemSpec> systems;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Throws ParseError on malformed lines and ConfigError on unknown keys or
/// out-of-range values (every grid point is validated).
ExperimentSpec parse_experiment(std::string_view text);
/// Inverse of parse_experiment.
std::string format_experiment(const ExperimentSpec& spec);

/// A fully resolved parameter point of one system.
struct SystemPoint {
    std::string system;
    std::size_t index = 1;  // 1-based position in the system's grid
    std::size_t points = 1; // grid size of the system
    SystemKind kind = SystemKind::lm;
    std::vector<std::pair<std::string, std::string>> values;  // every key, sorted
    RunConfig run;
    RocchioParams rocchio;
    RelevanceModelParams rm;

    /// "name" for single-point systems, else "name.007" (zero-padded, so
    /// file names sort in grid order).
    std::string stem() const;
    /// Run tag: system name plus a digest of the parameter values.
    std::string tag() const;
    /// "key=value key=value".
    std::string label() const;
};

/// Grid points in lexicographic order of their (sorted-key) values; numeric
/// values within one key are sorted ascending first.
std::vector<SystemPoint> expand_grid(const ExperimentSpec& spec, const SystemSpec& system);

/// Shared artifacts for executing systems over a query set.
struct ExperimentContext {
    const Corpus& corpus;
    const RendererLookup& renderers;
    /// Cluster index per delta; only deltas used by mccluster points are needed.
    const std::map<std::size_t, ClusterIndex>& clusters;
};

/// Runs one point over every query (queries in parallel). Slot i holds the
/// ranking of queries[i].
std::vector<ScoredRanking> run_point(const SystemPoint& point, const std::vector<Query>& queries,
                                     const ExperimentContext& ctx, unsigned threads);

/// TREC run text: `qid Q0 docno rank score tag`, scores with 6 decimals.
std::string format_run(const Corpus& corpus, const std::vector<Query>& queries,
                       const std::vector<ScoredRanking>& rankings, const std::string& tag);

/// Lists every RunConfig field with its default value.
std::string describe_run_defaults();

}  // namespace pseudoq
