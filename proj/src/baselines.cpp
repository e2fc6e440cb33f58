#include "pseudoq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"

namespace pseudoq {

ScoredRanking lm_baseline(const Query& query, const DocumentRenderers& renderers, std::size_t n) {
    if (query.tokens.empty()) throw DataError("lm_baseline: empty query");
    return {renderers.top(query.counts, n)};
}

double log_tfidf(std::uint64_t tf, std::size_t df, std::size_t num_docs) {
    if (tf == 0 || df == 0) return 0.0;
    return (1.0 + std::log(static_cast<double>(tf))) * std::log(static_cast<double>(num_docs) / static_cast<double>(df));
}

TermVector tfidf_vector(const TermCounts& counts, const Corpus& corpus) {
    TermVector v;
    for (const auto& e : counts.entries()) {
        if (e.term >= corpus.vocabulary_size()) continue;
        const double w = log_tfidf(e.count, corpus.document_frequency(e.term), corpus.size());
        if (w != 0.0) v.push_back({e.term, w});
    }
    return v;
}

double inner_product(const TermVector& a, const TermVector& b) {
    double sum = 0;
    auto i = a.begin(), j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->term < j->term) ++i;
        else if (j->term < i->term) ++j;
        else sum += (i++)->weight * (j++)->weight;
    }
    return sum;
}

namespace {

// support x documents below which KL is summed term by term per document.
constexpr std::size_t kDirectKlBudget = std::size_t{1} << 26;

// phi(r/p - 1) with phi(x) = (1+x) log(1+x) - x; a series near x = 0 avoids
// cancellation, and gaps within rounding of r and p count as zero.
double divergence_term(double r, double p) {
    const double diff = r - p;
    if (std::abs(diff) <= 4 * std::numeric_limits<double>::epsilon() * std::max(r, p)) return 0.0;
    const double x = diff / p;
    if (std::abs(x) >= 0.1) return (1 + x) * std::log1p(x) - x;
    // sum_{k>=2} (-1)^k x^k / (k (k-1))
    double term = x * x, sum = 0;
    for (int k = 2; k < 40; ++k) {
        const double t = term / (k * (k - 1.0));
        sum += t;
        if (std::abs(t) <= 1e-18 * std::abs(sum)) break;
        term *= -x;
    }
    return sum;
}

// Inner product of `q` with every document, accumulated term by term.
ScoredRanking rank_by_inner_product(const TermVector& q, const Corpus& corpus) {
    std::vector<double> scores(corpus.size(), 0.0);
    const auto n = corpus.size();
    for (const auto& tw : q)
        for (const auto& p : corpus.postings(tw.term))
            scores[p.doc] += tw.weight * log_tfidf(p.count, corpus.document_frequency(tw.term), n);
    return ScoredRanking::from_scores(scores);
}

}  // namespace

TermVector rocchio_expanded_query(const Query& query, const Corpus& corpus, const RocchioParams& params) {
    if (params.feedback_docs < 1) throw ConfigError("rocchio: feedback_docs must be >= 1");
    if (!(params.gamma >= 0)) throw ConfigError("rocchio: gamma must be >= 0");
    const TermVector q = tfidf_vector(query.counts, corpus);
    if (params.terms == 0 || params.gamma == 0.0) return q;

    std::size_t k1 = params.feedback_docs;
    if (k1 > corpus.size()) {
        diagnostic("rocchio: feedback_docs " + std::to_string(k1) + " clamped to corpus size");
        k1 = corpus.size();
    }
    const auto initial = rank_by_inner_product(q, corpus);

    std::vector<double> centroid(corpus.vocabulary_size(), 0.0);
    for (std::size_t i = 0; i < k1; ++i)
        for (const auto& tw : tfidf_vector(corpus.document(initial.entries[i].id).counts, corpus))
            centroid[tw.term] += tw.weight;

    std::vector<TermWeight> candidates;
    for (TermId t = 0; t < centroid.size(); ++t) {
        if (centroid[t] == 0.0 || query.counts.count(t) > 0) continue;
        candidates.push_back({t, centroid[t] / static_cast<double>(k1)});
    }
    const std::size_t keep = std::min(params.terms, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [](const TermWeight& a, const TermWeight& b) {
                          return ranks_before({a.term, a.weight}, {b.term, b.weight});
                      });
    candidates.resize(keep);

    TermVector expanded = q;
    for (const auto& c : candidates) expanded.push_back({c.term, params.gamma * c.weight});
    std::sort(expanded.begin(), expanded.end(), [](const TermWeight& a, const TermWeight& b) { return a.term < b.term; });
    return expanded;
}

ScoredRanking rocchio_rank(const Query& query, const Corpus& corpus, const RocchioParams& params, std::size_t n) {
    auto ranking = rank_by_inner_product(rocchio_expanded_query(query, corpus, params), corpus);
    ranking.truncate(n);
    return ranking;
}

double RelevanceDistribution::total() const {
    double s = 0;
    for (const auto& p : probs) s += p.weight;
    return s;
}

RelevanceDistribution estimate_relevance_model(const Query& query, const DocumentRenderers& renderers,
                                               const RelevanceModelParams& params) {
    if (params.feedback_docs < 1) throw ConfigError("relevance model: feedback_docs must be >= 1");
    if (!(params.lambda > 0.0 && params.lambda < 1.0)) throw ConfigError("relevance model: lambda must lie in (0,1)");
    if (query.tokens.empty()) throw DataError("relevance model: empty query");
    const auto& corpus = renderers.corpus();
    const double lambda = params.lambda;

    const auto feedback = renderers.top(query.counts, params.feedback_docs);

    // Document weights proportional to the smoothed query likelihood.
    std::vector<double> log_w;
    for (const auto& f : feedback) {
        const auto& doc = corpus.document(f.id);
        const double len = static_cast<double>(doc.length());
        double lw = 0;
        for (const auto& e : query.counts.entries()) {
            const double p = (1.0 - lambda) * doc.counts.count(e.term) / len + lambda * corpus.collection_prob(e.term);
            lw += e.count * std::log(p);
        }
        log_w.push_back(lw);
    }
    const double max_lw = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(max_lw)) throw DataError("relevance model: query unrenderable by the feedback documents");
    double z = 0;
    for (double& lw : log_w) z += (lw = std::exp(lw - max_lw));
    if (!(z > 0)) throw DataError("relevance model: query unrenderable by the feedback documents");

    std::vector<double> dense(corpus.vocabulary_size(), 0.0);
    for (std::size_t i = 0; i < feedback.size(); ++i) {
        const auto& doc = corpus.document(feedback[i].id);
        const double pi = log_w[i] / z;
        const double len = static_cast<double>(doc.length());
        for (const auto& e : doc.counts.entries()) dense[e.term] += pi * (1.0 - lambda) * e.count / len;
    }
    RelevanceDistribution r;
    for (TermId t = 0; t < dense.size(); ++t) {
        const double p = dense[t] + lambda * corpus.collection_prob(t);
        if (p > 0) r.probs.push_back({t, p});
    }
    return r;
}

RelevanceDistribution clip_relevance_model(const RelevanceDistribution& model, std::size_t k) {
    if (k == 0 || k >= model.support()) return model;
    auto probs = model.probs;
    // Heaviest first; weights equal up to rounding tie and go to the lower term.
    std::partial_sort(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(k), probs.end(),
                      [](const TermWeight& a, const TermWeight& b) {
                          return ranks_before({a.term, a.weight}, {b.term, b.weight});
                      });
    probs.resize(k);
    double total = 0;
    for (const auto& p : probs) total += p.weight;
    for (auto& p : probs) p.weight /= total;
    std::sort(probs.begin(), probs.end(), [](const TermWeight& a, const TermWeight& b) { return a.term < b.term; });
    return {std::move(probs)};
}


std::vector<double> relevance_model_scores(const RelevanceDistribution& model, const DocumentRenderers& renderers,
                                           bool direct) {
    const auto& corpus = renderers.corpus();
    const double mu = renderers.mu();
    std::vector<double> scores(corpus.size());
    if (direct) {
        // With R summing to one over its support S,
        //   KL = sum_{w in S} p_d(w) phi(R(w)/p_d(w) - 1) + p_d(outside S),
        // phi(x) = (1+x) log(1+x) - x >= 0. Every term is nonnegative and the
        // outside mass comes from integer counts, so near-zero divergences
        // keep their relative accuracy.
        std::uint64_t support_cf = 0;
        for (const auto& p : model.probs) support_cf += corpus.collection_count(p.term);
        const double c_len = static_cast<double>(corpus.collection_length());
        const double outside_collection = static_cast<double>(corpus.collection_length() - support_cf) / c_len;
        for (const auto& doc : corpus.documents()) {
            const double len = static_cast<double>(doc.length()) + mu;
            const auto& entries = doc.counts.entries();
            auto e = entries.begin();
            std::uint64_t support_tf = 0;
            double kl = 0;
            for (const auto& p : model.probs) {
                while (e != entries.end() && e->term < p.term) ++e;
                const std::uint64_t c = e != entries.end() && e->term == p.term ? e->count : 0;
                support_tf += c;
                const double pd = (static_cast<double>(c) + mu * corpus.collection_prob(p.term)) / len;
                kl += pd * divergence_term(p.weight, pd);
            }
            kl += (static_cast<double>(doc.length() - support_tf) + mu * outside_collection) / len;
            scores[doc.id] = -kl;
        }
    } else {
        // Sparse form for large supports; loses relative accuracy only when
        // KL itself is within ~1e-14 of zero.
        // -KL(R || Dir_d) = -sum R log R + sum R log(mu p_w) - log(|d| + mu)
        //                   + sum_{w in d} R(w) [log(c_d(w) + mu p_w) - log(mu p_w)]
        double base = 0;
        double mass = 0;
        std::vector<double> r_of(corpus.vocabulary_size(), 0.0);
        for (const auto& p : model.probs) {
            base += p.weight * (std::log(mu * corpus.collection_prob(p.term)) - std::log(p.weight));
            mass += p.weight;
            r_of[p.term] = p.weight;
        }
        for (const auto& doc : corpus.documents()) {
            double s = base - mass * std::log(static_cast<double>(doc.length()) + mu);
            for (const auto& e : doc.counts.entries()) {
                const double r = r_of[e.term];
                if (r == 0.0) continue;
                const double mp = mu * corpus.collection_prob(e.term);
                s += r * (std::log(e.count + mp) - std::log(mp));
            }
            scores[doc.id] = s;
        }
    }
    return scores;
}

ScoredRanking relevance_model_rank(const Query& query, const DocumentRenderers& renderers,
                                   const RelevanceModelParams& params, std::size_t n) {
    const auto& corpus = renderers.corpus();
    auto model = clip_relevance_model(estimate_relevance_model(query, renderers, params), params.clip);

    const auto scores = relevance_model_scores(model, renderers, model.support() * corpus.size() <= kDirectKlBudget);
    // Scores are -KL (at most 0); rank over every document.
    std::vector<ScoredId> entries;
    entries.reserve(scores.size());
    for (DocId d = 0; d < scores.size(); ++d) entries.push_back({d, scores[d]});
    auto ranking = ScoredRanking::from_entries(std::move(entries));
    ranking.truncate(n);
    return ranking;
}

}  // namespace pseudoq
