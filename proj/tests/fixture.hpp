#pragma once

#include <memory>
#include <optional>

#include "pseudoq/clustering.hpp"
#include "pseudoq/lm.hpp"
#include "pseudoq/scoring.hpp"
#include "support.hpp"

namespace pseudoq::testing {

/// Corpus plus every derived artifact a scoring pass reads.
struct World {
    Corpus corpus;
    double mu;
    DocumentRenderers renderers;
    NeighborTable table;
    RendererLookup lookup;
    std::optional<ClusterIndex> clusters;
    Query query;

    World(Corpus c, double mu_, Query q, std::size_t k_max = 0)
        : corpus(std::move(c)),
          mu(mu_),
          renderers(corpus, mu),
          table(k_max ? precompute_neighbors(corpus, k_max, mu) : NeighborTable{}),
          lookup(renderers, k_max ? &table : nullptr),
          query(std::move(q)) {}

    World(const World&) = delete;

    void cluster_by_neighbors(std::size_t delta) {
        clusters = build_clusters(corpus, precompute_neighbors(corpus, delta, mu), delta);
    }
    void cluster_by_members(std::vector<std::vector<DocId>> members, std::size_t delta) {
        clusters = ClusterIndex::from_members(corpus, mu, delta, std::move(members));
    }
    std::vector<std::vector<DocId>> members() const {
        std::vector<std::vector<DocId>> out;
        if (clusters)
            for (const auto& c : clusters->clusters()) out.push_back(c.members);
        return out;
    }
    ScoringContext context() const { return {corpus, lookup, clusters ? &*clusters : nullptr, query}; }
};

inline std::unique_ptr<World> random_world(std::mt19937_64& rng, std::size_t docs, std::size_t vocab,
                                           std::size_t k_max = 0) {
    auto c = random_corpus(rng, docs, vocab);
    auto q = random_query(rng, c, 1 + rng() % 3);
    const double mu = std::vector<double>{0.5, 5, 50, 2000}[rng() % 4];
    return std::make_unique<World>(std::move(c), mu, std::move(q), k_max);
}

/// Random pseudo-query list of documents (optionally headed by the query),
/// with nonincreasing weights and some zero-weight padding.
inline PseudoQueryList random_pseudo_queries(std::mt19937_64& rng, const Corpus& c, bool with_query) {
    std::vector<DocId> ids(c.size());
    for (DocId d = 0; d < c.size(); ++d) ids[d] = d;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<PseudoQuery> items;
    double w = 1.0;
    if (with_query) items.push_back({kQueryTextId, w});
    const std::size_t n = 1 + rng() % std::min<std::size_t>(c.size(), 6);
    for (std::size_t i = 0; i < n; ++i) {
        w *= std::uniform_real_distribution<double>(0.3, 1.0)(rng);
        items.push_back({ids[i], w});
    }
    if (rng() % 2 && n < c.size()) items.push_back({ids[n], 0.0});
    return PseudoQueryList(std::move(items));
}

}  // namespace pseudoq::testing
