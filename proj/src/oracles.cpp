#include "pseudoq/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <quadmath.h>

#include "pseudoq/error.hpp"

namespace pseudoq::oracle {

namespace {

using Dense = std::vector<double>;

struct Desk {
    std::size_t docs = 0;
    std::size_t vocab = 0;
    std::vector<Dense> counts;  // per document
    Dense length;
    Dense collection;           // MLE collection probabilities
    Dense df;
};

Dense dense(const TermCounts& tc, std::size_t vocab) {
    Dense v(vocab, 0.0);
    for (const auto& e : tc.entries()) v.at(e.term) = static_cast<double>(e.count);
    return v;
}

double total(const Dense& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Desk desk(const Corpus& corpus) {
    if (corpus.size() > kMaxDocuments || corpus.vocabulary_size() > kMaxVocabulary)
        throw Error("oracle is desk-scale only");
    Desk k;
    k.docs = corpus.size();
    k.vocab = corpus.vocabulary_size();
    k.collection.assign(k.vocab, 0.0);
    k.df.assign(k.vocab, 0.0);
    double all = 0;
    for (const auto& doc : corpus.documents()) {
        k.counts.push_back(dense(doc.counts, k.vocab));
        k.length.push_back(total(k.counts.back()));
        for (std::size_t w = 0; w < k.vocab; ++w) {
            k.collection[w] += k.counts.back()[w];
            if (k.counts.back()[w] > 0) k.df[w] += 1;
        }
        all += k.length.back();
    }
    for (auto& c : k.collection) c /= all;
    return k;
}

// Scores are compared at 40 significant bits, rounded half to even.
double rounded(double x) {
    if (x == 0 || !std::isfinite(x)) return x;
    const double unit = std::ldexp(1.0, std::ilogb(x) - 39);
    return std::rint(x / unit) * unit;
}

bool before(const ScoredId& a, const ScoredId& b) {
    const double x = rounded(a.score), y = rounded(b.score);
    if (x != y) return x > y;
    return a.id < b.id;
}

ScoredRanking ranked(const Dense& scores) {
    ScoredRanking r;
    for (std::size_t d = 0; d < scores.size(); ++d) r.entries.push_back({static_cast<std::uint32_t>(d), scores[d]});
    std::stable_sort(r.entries.begin(), r.entries.end(), before);
    return r;
}

double render(const Desk& k, const Dense& x, const Dense& r, double mu) {
    const double len = total(r);
    std::vector<double> logs;
    for (std::size_t w = 0; w < k.vocab; ++w)
        for (int i = 0; i < static_cast<int>(x[w]); ++i) logs.push_back(std::log((r[w] + mu * k.collection[w]) / (len + mu)));
    if (logs.empty()) throw DataError("oracle: empty text");
    std::sort(logs.begin(), logs.end());
    double sum = 0;
    for (double l : logs) sum += l;
    return std::exp(sum / static_cast<double>(logs.size()));
}

// All documents as renderers of x, ranked.
std::vector<ScoredId> all_renderers(const Desk& k, const Dense& x, double mu) {
    Dense s(k.docs);
    for (std::size_t d = 0; d < k.docs; ++d) s[d] = render(k, x, k.counts[d], mu);
    return ranked(s).entries;
}

std::vector<ScoredId> first(std::vector<ScoredId> v, std::size_t n) {
    if (v.size() > n) v.resize(n);
    return v;
}

Dense text_of(const Desk& k, const Query& query, std::uint32_t id) {
    if (id == kQueryTextId) {
        Dense q(k.vocab, 0.0);
        for (auto t : query.tokens) q.at(t) += 1;
        return q;
    }
    return k.counts.at(id);
}

Dense query_scores(const Desk& k, const Query& query, double mu) {
    const Dense q = text_of(k, query, kQueryTextId);
    Dense s(k.docs);
    for (std::size_t d = 0; d < k.docs; ++d) s[d] = render(k, q, k.counts[d], mu);
    return s;
}

ScoredRanking vdoc(const Desk& k, const PseudoQueryList& pq, std::size_t alpha, const Query& query, double mu) {
    const double n = static_cast<double>(k.docs);
    Dense rank(k.docs, n + 1);
    Dense p = query_scores(k, query, mu);
    auto active = pq.active();
    for (std::size_t i = active.size(); i-- > 0;) {
        // Walking backwards leaves each document with its earliest pseudo-query.
        for (const auto& r : first(all_renderers(k, text_of(k, query, active[i].id), mu), alpha)) {
            rank[r.id] = static_cast<double>(i + 1);
            p[r.id] = r.score;
        }
    }
    Dense s(k.docs);
    for (std::size_t d = 0; d < k.docs; ++d) s[d] = (p[d] + 2 * (n - rank[d] + 1)) / (1 + 2 * n);
    return ranked(s);
}

ScoredRanking mcdoc(const Desk& k, const PseudoQueryList& pq, const MethodParams& params, const Query& query,
                    double mu) {
    Dense s(k.docs, 0.0);
    for (const auto& q : pq.active()) {
        const auto all = all_renderers(k, text_of(k, query, q.id), mu);
        double norm = 0;
        for (const auto& r : first(all, params.m)) norm += r.score;
        for (const auto& r : first(all, params.alpha)) s[r.id] += q.weight * r.score / norm;
    }
    return ranked(s);
}

ScoredRanking mccluster(const Desk& k, const PseudoQueryList& pq, const MethodParams& params, const Query& query,
                        double mu, const std::vector<std::vector<DocId>>& members, bool first_round) {
    std::vector<Dense> ctext;
    for (const auto& m : members) {
        Dense t(k.vocab, 0.0);
        for (auto d : m)
            for (std::size_t w = 0; w < k.vocab; ++w) t[w] += k.counts.at(d)[w];
        ctext.push_back(std::move(t));
    }

    Dense cscore(members.size(), 0.0);
    for (const auto& q : pq.active()) {
        if (q.id == kQueryTextId && !first_round) throw DataError("oracle: the query only renders clusters in round 1");
        const Dense x = text_of(k, query, q.id);
        std::vector<ScoredId> cand;
        for (std::uint32_t c = 0; c < members.size(); ++c) {
            const bool in = q.id == kQueryTextId ||
                            std::find(members[c].begin(), members[c].end(), q.id) != members[c].end();
            if (in) cand.push_back({c, render(k, x, ctext[c], mu)});
        }
        double norm = 0;
        for (const auto& c : cand) norm += c.score;
        std::stable_sort(cand.begin(), cand.end(), before);
        for (const auto& c : first(cand, params.alpha_cluster)) cscore[c.id] += q.weight * c.score / norm;
    }

    Dense s(k.docs, 0.0);
    for (std::uint32_t c = 0; c < members.size(); ++c) {
        if (cscore[c] == 0.0) continue;
        std::vector<ScoredId> mr;
        for (auto d : members[c]) mr.push_back({d, render(k, ctext[c], k.counts[d], mu)});
        double norm = 0;
        for (const auto& r : mr) norm += r.score;
        std::stable_sort(mr.begin(), mr.end(), before);
        for (const auto& r : first(mr, params.beta)) s[r.id] += cscore[c] * (r.score / norm);
    }
    return ranked(s);
}

ScoredRanking interpolation(const ScoredRanking& method, const Dense& q, double lambda) {
    double smax = 0, qmax = 0;
    for (const auto& e : method.entries) {
        smax = std::max(smax, e.score);
        qmax = std::max(qmax, q[e.id]);
    }
    ScoredRanking out;
    for (const auto& e : method.entries) {
        const double v = smax > 0 ? lambda * (e.score / smax) + (1.0 - lambda) * (q[e.id] / qmax) : q[e.id] / qmax;
        out.entries.push_back({e.id, v});
    }
    std::stable_sort(out.entries.begin(), out.entries.end(), before);
    return out;
}

ScoredRanking rerank(const ScoredRanking& method, const Dense& q, std::size_t n) {
    ScoredRanking out;
    for (std::size_t i = 0; i < method.entries.size() && i < n; ++i)
        if (method.entries[i].score > 0) out.entries.push_back({method.entries[i].id, q[method.entries[i].id]});
    std::stable_sort(out.entries.begin(), out.entries.end(), before);
    return out;
}

ScoredRanking truncation(const ScoredRanking& method, std::size_t n) {
    ScoredRanking out = method;
    for (std::size_t i = n; i < out.entries.size(); ++i) out.entries[i].score = 0;
    std::stable_sort(out.entries.begin(), out.entries.end(), before);
    return out;
}

}  // namespace

double rendition(const Corpus& corpus, const TermCounts& x, const TermCounts& r, double mu) {
    const Desk k = desk(corpus);
    return render(k, dense(x, k.vocab), dense(r, k.vocab), mu);
}

std::vector<ScoredId> top_document_renderers(const Corpus& corpus, const TermCounts& x, std::size_t k, double mu) {
    const Desk d = desk(corpus);
    return first(all_renderers(d, dense(x, d.vocab), mu), k);
}

std::vector<DocId> document_repertoire(const Corpus& corpus, DocId renderer, std::size_t k, double mu) {
    const Desk d = desk(corpus);
    std::vector<DocId> out;
    for (DocId x = 0; x < d.docs; ++x)
        for (const auto& r : first(all_renderers(d, d.counts[x], mu), k))
            if (r.id == renderer) out.push_back(x);
    return out;
}

std::vector<std::vector<DocId>> cluster_members(const Corpus& corpus, std::size_t delta, double mu) {
    const Desk d = desk(corpus);
    std::vector<std::vector<DocId>> out;
    for (DocId s = 0; s < d.docs; ++s) {
        std::vector<DocId> m;
        for (const auto& r : first(all_renderers(d, d.counts[s], mu), delta)) m.push_back(r.id);
        std::sort(m.begin(), m.end());
        out.push_back(std::move(m));
    }
    return out;
}

ScoredRanking method_scores(Method method, const PseudoQueryList& pq, const MethodParams& params,
                            const Corpus& corpus, const Query& query, double mu,
                            const std::vector<std::vector<DocId>>& members, bool first_round) {
    const Desk k = desk(corpus);
    switch (method) {
        case Method::vdoc: return vdoc(k, pq, params.alpha, query, mu);
        case Method::mcdoc: return mcdoc(k, pq, params, query, mu);
        case Method::mccluster: return mccluster(k, pq, params, query, mu, members, first_round);
    }
    throw Error("oracle: unknown method");
}

ScoredRanking round_drift(const DriftTechnique& t, const ScoredRanking& scores, const Corpus& corpus,
                          const Query& query, double mu) {
    const Desk k = desk(corpus);
    switch (t.kind) {
        case DriftKind::iterated_truncation: return truncation(scores, t.cutoff);
        case DriftKind::iterated_rerank: return rerank(scores, query_scores(k, query, mu), t.cutoff);
        case DriftKind::iterated_interpolation: return interpolation(scores, query_scores(k, query, mu), t.lambda);
        default: return scores;
    }
}

ScoredRanking final_drift(const DriftTechnique& t, const ScoredRanking& scores, const Corpus& corpus,
                          const Query& query, double mu) {
    const Desk k = desk(corpus);
    switch (t.kind) {
        case DriftKind::interpolation: return interpolation(scores, query_scores(k, query, mu), t.lambda);
        case DriftKind::truncated_rerank: return rerank(scores, query_scores(k, query, mu), t.cutoff);
        default: return scores;
    }
}

ScoredRanking retrieval(const Query& query, const RunConfig& config, const Corpus& corpus,
                        const std::vector<std::vector<DocId>>& members) {
    DriftTechnique drift = config.drift;
    drift.cutoff = config.drift.cutoff == 0 ? config.depth : config.drift.cutoff;
    const std::size_t m = config.m == 0 ? 2 * config.alpha : config.m;

    PseudoQueryList pq({{kQueryTextId, 1.0}});
    ScoredRanking ranking;
    for (std::size_t t = 1; t <= config.rounds; ++t) {
        MethodParams p;
        p.alpha = t == 1 ? config.alpha1 : config.alpha;
        p.alpha_cluster = t == 1 ? config.alpha1 : config.alpha_cluster;
        p.beta = config.beta;
        p.m = t == 1 ? std::max(m, config.alpha1 + 1) : m;
        ranking = method_scores(config.method, pq, p, corpus, query, config.mu, members, t == 1);
        ranking = round_drift(drift, ranking, corpus, query, config.mu);
        if (t < config.rounds) {
            std::vector<PseudoQuery> next;
            double top = 0.0;
            for (const auto& e : ranking.entries) top = std::max(top, e.score);
            for (const auto& e : ranking.entries)
                if (e.score > 0) next.push_back({e.id, e.score / top});
            pq = PseudoQueryList(std::move(next));
        }
    }
    ranking = final_drift(drift, ranking, corpus, query, config.mu);
    if (ranking.entries.size() > config.depth) ranking.entries.resize(config.depth);
    return ranking;
}

ScoredRanking lm_baseline(const Corpus& corpus, const Query& query, double mu, std::size_t n) {
    const Desk k = desk(corpus);
    return {first(all_renderers(k, text_of(k, query, kQueryTextId), mu), n)};
}

ScoredRanking rocchio(const Corpus& corpus, const Query& query, const RocchioParams& params, std::size_t n) {
    const Desk k = desk(corpus);
    const double docs = static_cast<double>(k.docs);
    auto weight = [&](double tf, std::size_t w) {
        return tf > 0 && k.df[w] > 0 ? (1 + std::log(tf)) * std::log(docs / k.df[w]) : 0.0;
    };
    std::vector<Dense> dv(k.docs, Dense(k.vocab));
    for (std::size_t d = 0; d < k.docs; ++d)
        for (std::size_t w = 0; w < k.vocab; ++w) dv[d][w] = weight(k.counts[d][w], w);
    const Dense qc = text_of(k, query, kQueryTextId);
    Dense q(k.vocab);
    for (std::size_t w = 0; w < k.vocab; ++w) q[w] = weight(qc[w], w);

    auto rank_by = [&](const Dense& v) {
        Dense s(k.docs, 0.0);
        for (std::size_t d = 0; d < k.docs; ++d)
            for (std::size_t w = 0; w < k.vocab; ++w) s[d] += v[w] * dv[d][w];
        return ranked(s);
    };

    Dense expanded = q;
    if (params.terms > 0 && params.gamma != 0.0) {
        const std::size_t k1 = std::min(params.feedback_docs, k.docs);
        const auto initial = rank_by(q);
        Dense centroid(k.vocab, 0.0);
        for (std::size_t i = 0; i < k1; ++i)
            for (std::size_t w = 0; w < k.vocab; ++w) centroid[w] += dv[initial.entries[i].id][w];
        std::vector<ScoredId> cand;
        for (std::uint32_t w = 0; w < k.vocab; ++w)
            if (centroid[w] > 0 && qc[w] == 0) cand.push_back({w, centroid[w] / static_cast<double>(k1)});
        std::stable_sort(cand.begin(), cand.end(), before);
        for (const auto& c : first(cand, params.terms)) expanded[c.id] = q[c.id] + params.gamma * c.score;
    }
    auto out = rank_by(expanded);
    if (out.entries.size() > n) out.entries.resize(n);
    return out;
}

ScoredRanking relevance_model(const Corpus& corpus, const Query& query, double mu, const RelevanceModelParams& params,
                              std::size_t n) {
    // Evaluated in quad precision so that mathematical ties and zero
    // divergences survive as such (up to a 1e-28 noise floor).
    __extension__ typedef __float128 Quad;
    constexpr double kQuadTie = 1e-28;
    // Parameters arrive as doubles, so a mathematical tie between term weights
    // may be split by ~1e-16 before any arithmetic happens.
    constexpr double kParamTie = 1e-14;
    const Desk k = desk(corpus);
    const Quad lambda = params.lambda;
    std::vector<Quad> cf(k.vocab, 0);
    Quad all = 0;
    for (std::size_t d = 0; d < k.docs; ++d)
        for (std::size_t w = 0; w < k.vocab; ++w) {
            cf[w] += k.counts[d][w];
            all += k.counts[d][w];
        }
    auto collection = [&](std::size_t w) { return cf[w] / all; };
    auto smoothed = [&](std::size_t d, std::size_t w) {
        return (1 - lambda) * k.counts[d][w] / k.length[d] + lambda * collection(w);
    };
    const auto feedback = first(all_renderers(k, text_of(k, query, kQueryTextId), mu), params.feedback_docs);

    std::vector<Quad> pi;
    Quad z = 0;
    for (const auto& f : feedback) {
        Quad p = 1;
        for (auto t : query.tokens) p *= smoothed(f.id, t);
        pi.push_back(p);
        z += p;
    }

    struct Entry {
        std::size_t term;
        Quad p;
    };
    std::vector<Entry> r;
    for (std::size_t w = 0; w < k.vocab; ++w) {
        Quad p = 0;
        for (std::size_t i = 0; i < feedback.size(); ++i) p += pi[i] / z * smoothed(feedback[i].id, w);
        if (p > 0) r.push_back({w, p});
    }
    if (params.clip > 0 && params.clip < r.size()) {
        // Heaviest first; within a tie, lower term id first.
        std::stable_sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.p > b.p; });
        for (std::size_t i = 0; i < r.size();) {
            std::size_t j = i + 1;
            while (j < r.size() && r[i].p - r[j].p <= kParamTie * r[i].p) ++j;
            std::stable_sort(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j),
                             [](const Entry& a, const Entry& b) { return a.term < b.term; });
            i = j;
        }
        r.resize(params.clip);
        Quad mass = 0;
        for (const auto& e : r) mass += e.p;
        for (auto& e : r) e.p /= mass;
    }

    Dense s(k.docs, 0.0);
    for (std::size_t d = 0; d < k.docs; ++d) {
        Quad kl = 0;
        for (const auto& e : r) {
            const Quad pd = (k.counts[d][e.term] + Quad(mu) * collection(e.term)) / (k.length[d] + Quad(mu));
            kl += e.p * logq(e.p / pd);
        }
        s[d] = kl <= kQuadTie && kl >= -kQuadTie ? 0.0 : -static_cast<double>(kl);
    }
    auto out = ranked(s);
    if (out.entries.size() > n) out.entries.resize(n);
    return out;
}

double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("oracle: samples must be paired");
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    const std::size_t n = d.size();
    if (n > 20) throw Error("oracle is desk-scale only");

    // Doubled mid-ranks: 2 * (#smaller) + #equal + 1.
    std::vector<long> r2(n);
    for (std::size_t i = 0; i < n; ++i) {
        long less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) ++less;
            else if (std::abs(d[j]) == std::abs(d[i])) ++equal;
        }
        r2[i] = 2 * less + equal + 1;
    }
    long observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) observed += r2[i];

    double low = 0, high = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        long w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += r2[i];
        if (w <= observed) low += 1;
        if (w >= observed) high += 1;
    }
    return std::min(1.0, 2 * std::min(low, high) / std::ldexp(1.0, static_cast<int>(n)));
}

}  // namespace pseudoq::oracle
