#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pseudoq/clustering.hpp"
#include "pseudoq/drift.hpp"
#include "pseudoq/lm.hpp"
#include "pseudoq/scoring.hpp"

namespace pseudoq {

enum class Method { vdoc, mcdoc, mccluster };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Free parameters of one iterative run. Defaults sit inside the search
/// ranges used for the TREC experiments.
struct RunConfig {
    Method method = Method::mcdoc;
    std::size_t alpha = 10;         // top renderers per pseudo-query after round 1
    std::size_t alpha1 = 50;        // top renderers of the query in round 1
    std::size_t alpha_cluster = 2;  // cluster renderers per pseudo-query
    std::size_t beta = 10;          // documents credited per cluster
    std::size_t delta = 40;         // cluster size
    std::size_t m = 0;              // re-scaling pool; 0 means 2 * alpha
    std::size_t rounds = 2;         // T
    double mu = 2000;
    DriftTechnique drift{DriftKind::truncated_rerank, 0.5, 0};  // cutoff 0 means N
    std::size_t depth = 1000;       // N

    std::size_t effective_m() const { return m == 0 ? 2 * alpha : m; }
    std::size_t effective_cutoff() const { return drift.cutoff == 0 ? depth : drift.cutoff; }
    /// Throws ConfigError on invalid values; warns when rounds > 10.
    void validate() const;
};

struct RoundTrace {
    std::size_t round = 0;
    std::size_t pseudo_queries = 0;
    std::size_t spread = 0;  // alpha1 in round 1, alpha (or alpha_cluster) afterwards
    std::vector<ScoredId> top;  // first ten entries after the round's drift step
};

struct RetrievalResult {
    ScoredRanking ranking;  // at most N entries
    std::vector<RoundTrace> rounds;
};

/// Shared, read-only artifacts a run needs.
struct RetrievalContext {
    const Corpus& corpus;
    const RendererLookup& renderers;
    const ClusterIndex* clusters = nullptr;
};

/// Iterative pseudo-query retrieval: round 1 scores the query alone; each
/// later round uses the previous ranking (positive scores, max-normalized
/// into weights) as pseudo-queries. Iterated drift techniques act after
/// every round, final-round techniques after the last one.
RetrievalResult run_retrieval(const Query& query, const RunConfig& config, const RetrievalContext& ctx);

/// Scores divided by the list maximum; zero-score entries are dropped.
PseudoQueryList pseudo_queries_from(const ScoredRanking& ranking);

}  // namespace pseudoq
