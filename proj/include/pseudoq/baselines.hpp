#pragma once

#include <cstddef>
#include <vector>

#include "pseudoq/corpus.hpp"
#include "pseudoq/lm.hpp"
#include "pseudoq/scoring.hpp"

namespace pseudoq {

/// Query-likelihood ranking by the query's rendition score, truncated to n.
ScoredRanking lm_baseline(const Query& query, const DocumentRenderers& renderers, std::size_t n);

struct TermWeight {
    TermId term;
    double weight;

    bool operator==(const TermWeight&) const = default;
};

/// Sparse term weights sorted by term id; zero weights are not stored.
using TermVector = std::vector<TermWeight>;

/// Log tf.idf: (1 + ln tf) * ln(|D| / df) for tf > 0.
double log_tfidf(std::uint64_t tf, std::size_t df, std::size_t num_docs);
TermVector tfidf_vector(const TermCounts& counts, const Corpus& corpus);
double inner_product(const TermVector& a, const TermVector& b);

struct RocchioParams {
    std::size_t feedback_docs = 10;  // k1
    std::size_t terms = 20;          // expansion terms added
    double gamma = 0.5;              // weight of the expansion terms
};

/// q + gamma * (centroid of the top feedback documents, restricted to its
/// `terms` heaviest terms absent from q). Positive feedback only.
TermVector rocchio_expanded_query(const Query& query, const Corpus& corpus, const RocchioParams& params);
ScoredRanking rocchio_rank(const Query& query, const Corpus& corpus, const RocchioParams& params, std::size_t n);

struct RelevanceModelParams {
    std::size_t feedback_docs = 10;  // k1
    double lambda = 0.5;             // collection weight inside the document models
    std::size_t clip = 0;            // 0 keeps every term
};

/// Sparse term distribution sorted by term id; entries are positive.
struct RelevanceDistribution {
    std::vector<TermWeight> probs;

    std::size_t support() const { return probs.size(); }
    double total() const;
};

/// i.i.d.-sampling relevance model over the top feedback documents, with
/// document weights proportional to their smoothed query likelihood.
RelevanceDistribution estimate_relevance_model(const Query& query, const DocumentRenderers& renderers,
                                               const RelevanceModelParams& params);
/// Keeps the `k` most probable terms (ties, as in ranks_before, to the lower
/// term id) and renormalizes.
RelevanceDistribution clip_relevance_model(const RelevanceDistribution& model, std::size_t k);
/// -KL(R || Dirichlet(d)) per document id. `direct` sums term by term over
/// the support of R per document; otherwise a sparse decomposition touching
/// only each document's own terms is used (cheaper for large supports, but
/// with absolute rather than relative accuracy near KL = 0).
std::vector<double> relevance_model_scores(const RelevanceDistribution& model, const DocumentRenderers& renderers,
                                           bool direct);
/// Ranks documents by -KL(R || Dirichlet(d)), direct whenever the support
/// times the corpus size is affordable.
ScoredRanking relevance_model_rank(const Query& query, const DocumentRenderers& renderers,
                                   const RelevanceModelParams& params, std::size_t n);

}  // namespace pseudoq
