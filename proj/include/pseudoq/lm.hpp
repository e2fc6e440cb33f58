#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pseudoq/corpus.hpp"

namespace pseudoq {

/// Reserved text id for the user's query when it is treated as a
/// pseudo-query alongside document ids.
inline constexpr std::uint32_t kQueryTextId = 0xFFFFFFFFu;

/// An item (document, cluster or query) together with a score. Ranked lists
/// of these are ordered by score descending, then id ascending; scores are
/// compared through tie_key.
struct ScoredId {
    std::uint32_t id;
    double score;

    bool operator==(const ScoredId&) const = default;
};

/// Score rounded to kTieBits significant bits (half to even). Monotone, so
/// comparing keys is a strict weak ordering; scores that differ only by
/// rounding noise share a key and tie.
inline constexpr int kTieBits = 40;
inline double tie_key(double score) {
    int exp = 0;
    const double mantissa = std::frexp(score, &exp);
    return std::ldexp(std::nearbyint(std::ldexp(mantissa, kTieBits)), exp - kTieBits);
}

/// Strict ordering used everywhere a ranking is formed.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
    const double ka = tie_key(a.score), kb = tie_key(b.score);
    return ka > kb || (ka == kb && a.id < b.id);
}

/// Sorts `items` into ranking order and keeps the first k.
void keep_top(std::vector<ScoredId>& items, std::size_t k);

/// Product of MLE term probabilities of `seq` under `counts`; 0 if a term is
/// unseen. Throws DataError on an empty sequence.
double mle_prob(const TermCounts& counts, std::span<const TermId> seq);

/// (count(term|r) + mu * p_ML(term|D)) / (|r| + mu). Terms outside the
/// vocabulary get collection probability 0 and a diagnostic.
double dirichlet_term_prob(const TermCounts& renderer, TermId term, double mu, const Corpus& corpus);

/// Mean log Dirichlet probability of the tokens of x under renderer r. The
/// per-term contributions are summed in ascending order so that renderers
/// with equal contribution multisets get bit-identical scores.
double log_rendition(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus);

/// Geometric mean of the smoothed per-token probabilities: the rendition
/// score, proportional to exp(-KL(MLE_x || Dir_r)).
double rendition_prob(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus);
double rendition_prob(std::span<const TermId> seq, const TermCounts& renderer, double mu, const Corpus& corpus);

/// exp(-KL(MLE_x || Dir_r)) itself, i.e. rendition_prob times exp(H(MLE_x)).
double kl_rendition_prob(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus);

struct RendererCandidate {
    std::uint32_t id;
    const TermCounts* text;
};

/// The k candidates that render x best (ties to lower id).
std::vector<ScoredId> top_renderers(const TermCounts& x, std::span<const RendererCandidate> candidates, std::size_t k,
                                    double mu, const Corpus& corpus);

/// Ids of texts in `texts` for which `renderer` is among the top-k
/// renderers, ascending. Throws DataError if renderer is not a candidate.
std::vector<std::uint32_t> repertoire(std::uint32_t renderer, std::span<const RendererCandidate> texts,
                                      std::span<const RendererCandidate> candidates, std::size_t k, double mu,
                                      const Corpus& corpus);

/// Ranks all corpus documents as renderers of arbitrary texts. Documents
/// that share no term with the text are scored only as needed, via a
/// length-ordered scan.
class DocumentRenderers {
  public:
    DocumentRenderers(const Corpus& corpus, double mu);

    std::vector<ScoredId> top(const TermCounts& x, std::size_t k) const;
    /// rendition_prob(x, d) for every document, indexed by doc id.
    std::vector<double> all(const TermCounts& x) const;

    const Corpus& corpus() const { return *corpus_; }
    double mu() const { return mu_; }

  private:
    const Corpus* corpus_;
    double mu_;
    std::vector<DocId> by_length_;
};

/// Per-document top-k_max document renderers, persisted next to the index.
struct NeighborTable {
    std::string corpus_hash;
    double mu = 0;
    std::size_t k_max = 0;
    std::vector<std::vector<ScoredId>> lists;  // indexed by doc id

    bool operator==(const NeighborTable&) const = default;
};

/// k_max larger than |D| is clamped with a diagnostic.
NeighborTable precompute_neighbors(const Corpus& corpus, std::size_t k_max, double mu, unsigned threads = 1);

void save_neighbors(const NeighborTable& table, std::ostream& out);
/// Throws ArtifactMismatch unless the stored key equals (corpus hash, mu, k_max).
NeighborTable load_neighbors(std::istream& in, const Corpus& corpus, double mu, std::size_t k_max);
/// Loads any table built for `corpus` and `mu`, whatever its k_max.
NeighborTable load_neighbors(std::istream& in, const Corpus& corpus, double mu);

/// Top-k document renderers of a document, served from a neighbor table
/// when k fits, computed otherwise.
class RendererLookup {
  public:
    RendererLookup(const DocumentRenderers& renderers, const NeighborTable* table);

    std::vector<ScoredId> of_document(DocId d, std::size_t k) const;
    std::vector<ScoredId> of_text(const TermCounts& x, std::size_t k) const { return renderers_->top(x, k); }
    const DocumentRenderers& renderers() const { return *renderers_; }

  private:
    const DocumentRenderers* renderers_;
    const NeighborTable* table_;
};

std::string format_double_exact(double v);
double parse_double_exact(const std::string& s);

}  // namespace pseudoq
