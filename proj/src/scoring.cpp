#include "pseudoq/scoring.hpp"

#include <algorithm>
#include <optional>

#include "pseudoq/error.hpp"

namespace pseudoq {

PseudoQueryList::PseudoQueryList(std::vector<PseudoQuery> items) : items_(std::move(items)) {
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const double w = items_[i].weight;
        if (!(w >= 0.0 && w <= 1.0)) throw DataError("pseudo-query weight outside [0,1]");
        // Compared at tie precision: equal-key scores are ordered by id, not value.
        if (i > 0 && tie_key(w) > tie_key(items_[i - 1].weight))
            throw DataError("pseudo-query weights must be nonincreasing");
    }
}

PseudoQueryList PseudoQueryList::initial() { return PseudoQueryList({{kQueryTextId, 1.0}}); }

std::span<const PseudoQuery> PseudoQueryList::active() const {
    auto end = std::find_if(items_.begin(), items_.end(), [](const PseudoQuery& q) { return q.weight <= 0.0; });
    return {items_.begin(), end};
}

ScoredRanking ScoredRanking::from_scores(std::span<const double> scores) {
    ScoredRanking r;
    r.entries.reserve(scores.size());
    for (std::size_t d = 0; d < scores.size(); ++d) r.entries.push_back({static_cast<std::uint32_t>(d), scores[d]});
    std::sort(r.entries.begin(), r.entries.end(), ranks_before);
    return r;
}

ScoredRanking ScoredRanking::from_entries(std::vector<ScoredId> entries) {
    std::sort(entries.begin(), entries.end(), ranks_before);
    return {std::move(entries)};
}

std::vector<std::uint32_t> ScoredRanking::ids() const {
    std::vector<std::uint32_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.id);
    return out;
}

void MethodParams::validate() const {
    if (alpha < 1 || alpha_cluster < 1 || beta < 1 || m < 1) throw ConfigError("alpha, alpha_cluster, beta and m must be >= 1");
    if (m <= alpha) throw ConfigError("m must exceed alpha (m=" + std::to_string(m) + ", alpha=" + std::to_string(alpha) + ")");
}

const TermCounts& ScoringContext::text(std::uint32_t id) const {
    if (id == kQueryTextId) return query.counts;
    if (id >= corpus.size()) throw DataError("pseudo-query id " + std::to_string(id) + " is outside the corpus");
    return corpus.document(id).counts;
}

namespace {

std::vector<ScoredId> top_document_renderers(const ScoringContext& ctx, std::uint32_t id, std::size_t k) {
    if (id == kQueryTextId) return ctx.renderers.of_text(ctx.query.counts, k);
    return ctx.renderers.of_document(id, k);
}

}  // namespace

ScoredRanking score_vdoc(const PseudoQueryList& pq, std::size_t alpha, const ScoringContext& ctx) {
    if (pq.empty()) throw DataError("score_vdoc: empty pseudo-query list");
    if (alpha < 1) throw ConfigError("alpha must be >= 1");
    const std::size_t n = ctx.corpus.size();
    std::vector<std::size_t> rank(n, n + 1);
    std::vector<double> best(n, 0.0);

    auto active = pq.active();
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < active.size() && assigned < n; ++i) {
        for (const auto& r : top_document_renderers(ctx, active[i].id, alpha)) {
            if (rank[r.id] <= n) continue;
            rank[r.id] = i + 1;
            best[r.id] = r.score;
            ++assigned;
        }
    }
    if (assigned < n) {
        auto query_scores = ctx.renderers.renderers().all(ctx.query.counts);
        for (DocId d = 0; d < n; ++d)
            if (rank[d] > n) best[d] = query_scores[d];
    }

    const double denom = 1.0 + 2.0 * static_cast<double>(n);
    std::vector<double> scores(n);
    for (DocId d = 0; d < n; ++d)
        scores[d] = (best[d] + 2.0 * (static_cast<double>(n) - static_cast<double>(rank[d]) + 1.0)) / denom;
    return ScoredRanking::from_scores(scores);
}

ScoredRanking score_mcdoc(const PseudoQueryList& pq, const MethodParams& params, const ScoringContext& ctx) {
    params.validate();
    std::vector<double> scores(ctx.corpus.size(), 0.0);
    const std::size_t pool = std::max(params.alpha, params.m);
    for (const auto& q : pq.active()) {
        auto top = top_document_renderers(ctx, q.id, pool);
        double norm = 0;
        for (std::size_t i = 0; i < std::min(params.m, top.size()); ++i) norm += top[i].score;
        for (std::size_t i = 0; i < std::min(params.alpha, top.size()); ++i)
            scores[top[i].id] += q.weight * top[i].score / norm;
    }
    return ScoredRanking::from_scores(scores);
}

ScoredRanking score_mccluster(const PseudoQueryList& pq, const MethodParams& params, const ScoringContext& ctx,
                              bool first_round, ClusterScoringTrace* trace) {
    if (!ctx.clusters) throw DataError("cluster scoring requires a cluster index");
    if (params.alpha_cluster < 1 || params.beta < 1) throw ConfigError("alpha_cluster and beta must be >= 1");
    const auto& index = *ctx.clusters;
    if (index.corpus_hash() != ctx.corpus.hash() || index.mu() != ctx.mu())
        throw ArtifactMismatch("cluster index does not match the corpus or mu in use");

    // Phase 1: clusters credited by the pseudo-queries they may render.
    std::vector<double> cluster_scores(index.size(), 0.0);
    for (const auto& q : pq.active()) {
        const auto& text = ctx.text(q.id);
        auto candidates = cluster_membership(index, q.id, first_round);
        std::vector<ScoredId> scored;
        scored.reserve(candidates.size());
        double norm = 0;
        for (auto c : candidates) {
            const double p = rendition_prob(text, index.cluster(c).counts, ctx.mu(), ctx.corpus);
            norm += p;
            scored.push_back({c, p});
        }
        keep_top(scored, params.alpha_cluster);
        for (const auto& s : scored) {
            if (trace) {
                ++trace->cluster_credits;
                const auto& members = index.cluster(s.id).members;
                if (q.id != kQueryTextId && !std::binary_search(members.begin(), members.end(), q.id))
                    ++trace->cluster_violations;
            }
            cluster_scores[s.id] += q.weight * s.score / norm;
        }
    }

    // Phase 2: each cluster distributes its score to its best member renderers.
    std::vector<double> scores(ctx.corpus.size(), 0.0);
    for (const auto& cl : index.clusters()) {
        const double cs = cluster_scores[cl.id];
        if (cs == 0.0) continue;
        const std::size_t k = std::min(params.beta, cl.member_renderers.size());
        for (std::size_t i = 0; i < k; ++i) {
            const auto& r = cl.member_renderers[i];
            if (trace) {
                ++trace->document_credits;
                if (!std::binary_search(cl.members.begin(), cl.members.end(), r.id)) ++trace->document_violations;
            }
            // Ratio first: a singleton credits exactly cs, so baseline ties survive.
            scores[r.id] += cs * (r.score / cl.member_norm);
        }
    }
    return ScoredRanking::from_scores(scores);
}

}  // namespace pseudoq
