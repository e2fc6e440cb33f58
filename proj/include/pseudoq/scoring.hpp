#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "pseudoq/clustering.hpp"
#include "pseudoq/corpus.hpp"
#include "pseudoq/lm.hpp"

namespace pseudoq {

struct PseudoQuery {
    std::uint32_t id;  // kQueryTextId for the original query, else a doc id
    double weight;
};

/// Ranked pseudo-queries with weights in [0,1], nonincreasing under tie_key.
class PseudoQueryList {
  public:
    PseudoQueryList() = default;
    /// Throws DataError if weights leave [0,1] or increase along the list.
    explicit PseudoQueryList(std::vector<PseudoQuery> items);

    /// The first-round list: the query alone with weight 1.
    static PseudoQueryList initial();

    std::span<const PseudoQuery> items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    /// The prefix with positive weight.
    std::span<const PseudoQuery> active() const;

  private:
    std::vector<PseudoQuery> items_;
};

/// Documents in ranking order (score descending, doc id ascending).
struct ScoredRanking {
    std::vector<ScoredId> entries;

    /// Ranks every document by its entry in `scores` (indexed by doc id).
    static ScoredRanking from_scores(std::span<const double> scores);
    /// Sorts arbitrary entries into ranking order.
    static ScoredRanking from_entries(std::vector<ScoredId> entries);

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    /// Largest score; may exceed the first entry's by a few ulps within a tie group.
    double max_score() const {
        double m = entries.empty() ? 0.0 : entries.front().score;
        for (const auto& e : entries) m = std::max(m, e.score);
        return m;
    }
    std::vector<std::uint32_t> ids() const;
    void truncate(std::size_t n) {
        if (entries.size() > n) entries.resize(n);
    }

    bool operator==(const ScoredRanking&) const = default;
};

struct MethodParams {
    std::size_t alpha = 10;         // document renderers per pseudo-query
    std::size_t alpha_cluster = 2;  // cluster renderers per pseudo-query
    std::size_t beta = 10;          // documents credited per cluster
    std::size_t m = 20;             // re-scaling pool, m > alpha

    void validate() const;
};

/// Everything a scoring pass reads. Shared and immutable across queries.
struct ScoringContext {
    const Corpus& corpus;
    const RendererLookup& renderers;
    const ClusterIndex* clusters = nullptr;
    const Query& query;

    const TermCounts& text(std::uint32_t id) const;
    double mu() const { return renderers.renderers().mu(); }
};

/// Credit bookkeeping for the cluster method; violations stay at zero
/// unless a cluster credits a text outside its membership restriction.
struct ClusterScoringTrace {
    std::size_t cluster_credits = 0;
    std::size_t document_credits = 0;
    std::size_t cluster_violations = 0;
    std::size_t document_violations = 0;
};

/// Viterbi-style scoring: documents in the top-alpha of an earlier
/// pseudo-query outrank those reached only later; within one pseudo-query,
/// by rendition score. Scores follow the explicit
/// (p(q+|d) + 2(|D| - rank + 1)) / (1 + 2|D|) form, with rank |D|+1 and the
/// original query standing in for documents no pseudo-query reaches.
ScoredRanking score_vdoc(const PseudoQueryList& pq, std::size_t alpha, const ScoringContext& ctx);

/// Credits each document for every pseudo-query in its repertoire:
/// sum of w(q) * p(q|d) / N(q, m), N being the summed rendition scores of
/// q's top-m renderers.
ScoredRanking score_mcdoc(const PseudoQueryList& pq, const MethodParams& params, const ScoringContext& ctx);

/// Two-phase cluster scoring. Clusters are credited by the pseudo-queries
/// they contain (the query belongs to every cluster in the first round);
/// each cluster then passes its score to its top-beta member renderers.
ScoredRanking score_mccluster(const PseudoQueryList& pq, const MethodParams& params, const ScoringContext& ctx,
                              bool first_round, ClusterScoringTrace* trace = nullptr);

}  // namespace pseudoq
