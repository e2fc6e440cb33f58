#include "pseudoq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"

namespace pseudoq {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::vdoc: return "vdoc";
        case Method::mcdoc: return "mcdoc";
        case Method::mccluster: return "mccluster";
    }
    return "mcdoc";
}

Method parse_method(std::string_view name) {
    if (name == "vdoc") return Method::vdoc;
    if (name == "mcdoc") return Method::mcdoc;
    if (name == "mccluster") return Method::mccluster;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected vdoc|mcdoc|mccluster)");
}

void RunConfig::validate() const {
    if (alpha < 1 || alpha1 < 1 || alpha_cluster < 1 || beta < 1 || delta < 1)
        throw ConfigError("alpha, alpha1, alpha_cluster, beta and delta must be >= 1");
    if (rounds < 1) throw ConfigError("the number of rounds T must be >= 1");
    if (rounds > 10) diagnostic("T=" + std::to_string(rounds) + " rounds; a small number of rounds is expected");
    if (effective_m() <= alpha)
        throw ConfigError("m must exceed alpha (m=" + std::to_string(effective_m()) + ", alpha=" + std::to_string(alpha) + ")");
    if (!(mu > 0) || !std::isfinite(mu)) throw ConfigError("mu must be positive");
    if (depth < 1) throw ConfigError("retrieval depth N must be >= 1");
    DriftTechnique effective = drift;
    effective.cutoff = effective_cutoff();
    effective.validate();
}

PseudoQueryList pseudo_queries_from(const ScoredRanking& ranking) {
    std::vector<PseudoQuery> items;
    const double max = ranking.max_score();
    if (!(max > 0)) return {};
    for (const auto& e : ranking.entries) {
        if (!(e.score > 0)) break;
        items.push_back({e.id, e.score / max});
    }
    return PseudoQueryList(std::move(items));
}

RetrievalResult run_retrieval(const Query& query, const RunConfig& config, const RetrievalContext& ctx) {
    config.validate();
    if (query.tokens.empty()) throw DataError("query " + query.id + " is empty");
    if (ctx.renderers.renderers().mu() != config.mu)
        throw ArtifactMismatch("renderer lookup was built with a different mu than the run configuration");
    if (config.method == Method::mccluster) {
        if (!ctx.clusters) throw DataError("the cluster method needs a cluster index");
        if (ctx.clusters->delta() != config.delta)
            throw ArtifactMismatch("cluster index has delta=" + std::to_string(ctx.clusters->delta()) +
                                   ", run wants " + std::to_string(config.delta));
    }

    const ScoringContext sctx{ctx.corpus, ctx.renderers, ctx.clusters, query};
    const auto query_scores = ctx.renderers.renderers().all(query.counts);
    DriftTechnique drift = config.drift;
    drift.cutoff = config.effective_cutoff();

    RetrievalResult result;
    PseudoQueryList pq = PseudoQueryList::initial();
    ScoredRanking ranking;
    for (std::size_t t = 1; t <= config.rounds; ++t) {
        const bool first = t == 1;
        MethodParams params;
        params.alpha = first ? config.alpha1 : config.alpha;
        params.alpha_cluster = first ? config.alpha1 : config.alpha_cluster;
        params.beta = config.beta;
        // A lone first-round pseudo-query only rescales by its normalizer, so
        // the pool is widened to keep m above the first-round spread.
        params.m = first ? std::max(config.effective_m(), config.alpha1 + 1) : config.effective_m();

        switch (config.method) {
            case Method::vdoc: ranking = score_vdoc(pq, params.alpha, sctx); break;
            case Method::mcdoc: ranking = score_mcdoc(pq, params, sctx); break;
            case Method::mccluster: ranking = score_mccluster(pq, params, sctx, first); break;
        }
        ranking = apply_round_drift(drift, ranking, query_scores);

        for (const auto& e : ranking.entries)
            if (!std::isfinite(e.score) || e.score < 0) throw Error("non-finite or negative score in round " + std::to_string(t));

        RoundTrace trace;
        trace.round = t;
        trace.pseudo_queries = pq.active().size();
        trace.spread = config.method == Method::mccluster ? params.alpha_cluster : params.alpha;
        trace.top.assign(ranking.entries.begin(), ranking.entries.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, ranking.size())));
        result.rounds.push_back(std::move(trace));

        if (t < config.rounds) {
            pq = pseudo_queries_from(ranking);
            if (pq.empty()) throw DataError("round " + std::to_string(t) + " produced no positively scored documents");
        }
    }
    ranking = apply_final_drift(drift, ranking, query_scores);
    ranking.truncate(config.depth);
    result.ranking = std::move(ranking);
    return result;
}

}  // namespace pseudoq
