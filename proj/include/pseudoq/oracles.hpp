#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pseudoq/baselines.hpp"
#include "pseudoq/corpus.hpp"
#include "pseudoq/drift.hpp"
#include "pseudoq/pipeline.hpp"
#include "pseudoq/scoring.hpp"

// Brute-force reference implementations. Everything here is evaluated
// straight from the definitions over dense count vectors; nothing below the
// shared types is reused from the production modules. Desk scale only:
// |D| <= 64 and |V| <= 32, otherwise Error("oracle is desk-scale only").
namespace pseudoq::oracle {

inline constexpr std::size_t kMaxDocuments = 64;
inline constexpr std::size_t kMaxVocabulary = 32;

/// Geometric mean over the tokens of x of the Dirichlet-smoothed
/// probabilities under r.
double rendition(const Corpus& corpus, const TermCounts& x, const TermCounts& r, double mu);

/// Every document scored as a renderer of x, fully sorted, first k kept.
std::vector<ScoredId> top_document_renderers(const Corpus& corpus, const TermCounts& x, std::size_t k, double mu);

/// Documents whose top-k document renderers include `renderer`, ascending.
std::vector<DocId> document_repertoire(const Corpus& corpus, DocId renderer, std::size_t k, double mu);

/// Per seed: its top-delta document renderers, ascending.
std::vector<std::vector<DocId>> cluster_members(const Corpus& corpus, std::size_t delta, double mu);

/// Method scores over all documents, ranked. `members` gives the cluster
/// memberships (only read by mccluster).
ScoredRanking method_scores(Method method, const PseudoQueryList& pq, const MethodParams& params,
                            const Corpus& corpus, const Query& query, double mu,
                            const std::vector<std::vector<DocId>>& members, bool first_round);

/// Literal drift transforms on a ranking, with p(q|d) recomputed by brute force.
ScoredRanking round_drift(const DriftTechnique& t, const ScoredRanking& scores, const Corpus& corpus,
                          const Query& query, double mu);
ScoredRanking final_drift(const DriftTechnique& t, const ScoredRanking& scores, const Corpus& corpus,
                          const Query& query, double mu);

/// Straight-line replay of the iterative retrieval loop.
ScoredRanking retrieval(const Query& query, const RunConfig& config, const Corpus& corpus,
                        const std::vector<std::vector<DocId>>& members);

ScoredRanking lm_baseline(const Corpus& corpus, const Query& query, double mu, std::size_t n);
ScoredRanking rocchio(const Corpus& corpus, const Query& query, const RocchioParams& params, std::size_t n);
ScoredRanking relevance_model(const Corpus& corpus, const Query& query, double mu, const RelevanceModelParams& params,
                              std::size_t n);

/// Two-sided exact Wilcoxon signed-rank p-value by enumerating all 2^n sign
/// patterns of the nonzero differences (n <= 20).
double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b);

}  // namespace pseudoq::oracle
