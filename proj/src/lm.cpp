#include "pseudoq/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"
#include "pseudoq/parallel.hpp"

namespace pseudoq {

void keep_top(std::vector<ScoredId>& items, std::size_t k) {
    if (k < items.size()) {
        std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end(), ranks_before);
        items.resize(k);
    } else {
        std::sort(items.begin(), items.end(), ranks_before);
    }
}

double mle_prob(const TermCounts& counts, std::span<const TermId> seq) {
    if (seq.empty()) throw DataError("mle_prob: empty sequence");
    if (counts.length() == 0) throw DataError("mle_prob: empty term-count table");
    const double total = static_cast<double>(counts.length());
    double p = 1.0;
    for (auto w : seq) p *= static_cast<double>(counts.count(w)) / total;
    return p;
}

double dirichlet_term_prob(const TermCounts& renderer, TermId term, double mu, const Corpus& corpus) {
    if (mu < 0) throw DataError("dirichlet smoothing requires mu >= 0");
    if (term >= corpus.vocabulary_size())
        diagnostic("term id " + std::to_string(term) + " is outside the vocabulary; collection probability 0");
    const double denom = static_cast<double>(renderer.length()) + mu;
    if (denom <= 0) throw DataError("dirichlet_term_prob: empty renderer with mu = 0");
    return (static_cast<double>(renderer.count(term)) + mu * corpus.collection_prob(term)) / denom;
}

double log_rendition(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus) {
    if (x.empty()) throw DataError("rendition of an empty sequence");
    if (mu < 0) throw DataError("rendition requires mu >= 0");
    const double denom = static_cast<double>(renderer.length()) + mu;
    if (denom <= 0) throw DataError("rendition by an empty renderer");

    std::vector<double> parts;
    parts.reserve(x.unique_terms());
    auto r = renderer.entries();
    auto it = r.begin();
    for (const auto& e : x.entries()) {
        it = std::lower_bound(it, r.end(), e.term, [](const TermCount& a, TermId t) { return a.term < t; });
        const double c = (it != r.end() && it->term == e.term) ? it->count : 0.0;
        const double p = (c + mu * corpus.collection_prob(e.term)) / denom;
        if (!(p > 0)) throw DataError("zero rendition probability (unseen term with mu = 0)");
        parts.push_back(static_cast<double>(e.count) * std::log(p));
    }
    std::sort(parts.begin(), parts.end());
    double sum = 0;
    for (double v : parts) sum += v;
    return sum / static_cast<double>(x.length());
}

double rendition_prob(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus) {
    return std::exp(log_rendition(x, renderer, mu, corpus));
}

double rendition_prob(std::span<const TermId> seq, const TermCounts& renderer, double mu, const Corpus& corpus) {
    if (seq.empty()) throw DataError("rendition of an empty sequence");
    return rendition_prob(TermCounts::from_terms(seq), renderer, mu, corpus);
}

double kl_rendition_prob(const TermCounts& x, const TermCounts& renderer, double mu, const Corpus& corpus) {
    const double n = static_cast<double>(x.length());
    double kl = 0;
    for (const auto& e : x.entries()) {
        const double px = e.count / n;
        kl += px * (std::log(px) - std::log(dirichlet_term_prob(renderer, e.term, mu, corpus)));
    }
    return std::exp(-kl);
}

std::vector<ScoredId> top_renderers(const TermCounts& x, std::span<const RendererCandidate> candidates, std::size_t k,
                                    double mu, const Corpus& corpus) {
    if (k == 0) throw DataError("top_renderers: k must be >= 1");
    std::vector<ScoredId> scored;
    scored.reserve(candidates.size());
    for (const auto& c : candidates) scored.push_back({c.id, rendition_prob(x, *c.text, mu, corpus)});
    keep_top(scored, k);
    return scored;
}

std::vector<std::uint32_t> repertoire(std::uint32_t renderer, std::span<const RendererCandidate> texts,
                                      std::span<const RendererCandidate> candidates, std::size_t k, double mu,
                                      const Corpus& corpus) {
    if (std::none_of(candidates.begin(), candidates.end(), [&](const auto& c) { return c.id == renderer; }))
        throw DataError("repertoire: renderer " + std::to_string(renderer) + " is outside the candidate set");
    std::vector<std::uint32_t> members;
    for (const auto& x : texts) {
        auto top = top_renderers(*x.text, candidates, k, mu, corpus);
        if (std::any_of(top.begin(), top.end(), [&](const ScoredId& s) { return s.id == renderer; }))
            members.push_back(x.id);
    }
    std::sort(members.begin(), members.end());
    return members;
}

DocumentRenderers::DocumentRenderers(const Corpus& corpus, double mu) : corpus_(&corpus), mu_(mu) {
    if (!(mu > 0)) throw DataError("document renderers require mu > 0");
    by_length_.resize(corpus.size());
    for (DocId d = 0; d < corpus.size(); ++d) by_length_[d] = d;
    std::stable_sort(by_length_.begin(), by_length_.end(), [&](DocId a, DocId b) {
        return corpus.document(a).length() < corpus.document(b).length();
    });
}

std::vector<ScoredId> DocumentRenderers::top(const TermCounts& x, std::size_t k) const {
    const auto& corpus = *corpus_;
    if (k == 0 || corpus.empty()) return {};
    k = std::min(k, corpus.size());

    std::vector<char> touched(corpus.size(), 0);
    std::vector<ScoredId> scored;
    for (const auto& e : x.entries()) {
        if (e.term >= corpus.vocabulary_size()) continue;
        for (const auto& p : corpus.postings(e.term)) {
            if (touched[p.doc]) continue;
            touched[p.doc] = 1;
            scored.push_back({p.doc, 0.0});
        }
    }
    for (auto& s : scored) s.score = rendition_prob(x, corpus.document(s.id).counts, mu_, corpus);

    // Documents sharing no term with x score strictly lower the longer they
    // are, so the k shortest of them are the only ones that can qualify.
    std::size_t added = 0;
    for (DocId d : by_length_) {
        if (added == k) break;
        if (touched[d]) continue;
        scored.push_back({d, rendition_prob(x, corpus.document(d).counts, mu_, corpus)});
        ++added;
    }
    keep_top(scored, k);
    return scored;
}

std::vector<double> DocumentRenderers::all(const TermCounts& x) const {
    std::vector<double> out(corpus_->size());
    for (DocId d = 0; d < corpus_->size(); ++d) out[d] = rendition_prob(x, corpus_->document(d).counts, mu_, *corpus_);
    return out;
}

NeighborTable precompute_neighbors(const Corpus& corpus, std::size_t k_max, double mu, unsigned threads) {
    if (k_max == 0) throw DataError("precompute_neighbors: k_max must be >= 1");
    if (k_max > corpus.size()) {
        diagnostic("k_max " + std::to_string(k_max) + " exceeds corpus size " + std::to_string(corpus.size()) +
                   "; clamped");
        k_max = corpus.size();
    }
    DocumentRenderers renderers(corpus, mu);
    NeighborTable table;
    table.corpus_hash = corpus.hash();
    table.mu = mu;
    table.k_max = k_max;
    table.lists.resize(corpus.size());
    parallel_for(corpus.size(), threads,
                 [&](std::size_t d) { table.lists[d] = renderers.top(corpus.document(static_cast<DocId>(d)).counts, k_max); });
    return table;
}

std::string format_double_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_double_exact(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError("malformed number '" + s + "'");
    return v;
}

void save_neighbors(const NeighborTable& table, std::ostream& out) {
    out << "pseudoq-neighbors 1\n";
    out << "corpus " << table.corpus_hash << '\n';
    out << "mu " << format_double_exact(table.mu) << '\n';
    out << "k_max " << table.k_max << '\n';
    out << "lists " << table.lists.size() << '\n';
    for (const auto& list : table.lists) {
        out << list.size();
        for (const auto& s : list) out << ' ' << s.id << ' ' << format_double_exact(s.score);
        out << '\n';
    }
    out << "end\n";
}

namespace {

NeighborTable read_neighbors(std::istream& in) {
    auto expect = [&](std::string_view word) {
        std::string got;
        if (!(in >> got) || got != word) throw ParseError("neighbors: expected '" + std::string(word) + "'");
    };
    expect("pseudoq-neighbors");
    int version = 0;
    in >> version;
    if (version != 1) throw ParseError("neighbors: unsupported version");
    NeighborTable t;
    std::string mu;
    expect("corpus");
    in >> t.corpus_hash;
    expect("mu");
    in >> mu;
    t.mu = parse_double_exact(mu);
    expect("k_max");
    in >> t.k_max;
    expect("lists");
    std::size_t n = 0;
    in >> n;
    t.lists.resize(n);
    for (auto& list : t.lists) {
        std::size_t k = 0;
        in >> k;
        list.resize(k);
        for (auto& s : list) {
            std::string score;
            in >> s.id >> score;
            s.score = parse_double_exact(score);
        }
    }
    expect("end");
    return t;
}

void check_key(const NeighborTable& t, const Corpus& corpus, double mu) {
    if (t.corpus_hash != corpus.hash())
        throw ArtifactMismatch("neighbor table was built for corpus " + t.corpus_hash + ", not " + corpus.hash());
    if (t.mu != mu)
        throw ArtifactMismatch("neighbor table was built with mu=" + std::to_string(t.mu) + ", requested " +
                               std::to_string(mu));
    if (t.lists.size() != corpus.size()) throw ArtifactMismatch("neighbor table size does not match the corpus");
}

}  // namespace

NeighborTable load_neighbors(std::istream& in, const Corpus& corpus, double mu, std::size_t k_max) {
    auto t = read_neighbors(in);
    check_key(t, corpus, mu);
    if (t.k_max != std::min(k_max, corpus.size()))
        throw ArtifactMismatch("neighbor table has k_max=" + std::to_string(t.k_max) + ", requested " +
                               std::to_string(k_max));
    return t;
}

NeighborTable load_neighbors(std::istream& in, const Corpus& corpus, double mu) {
    auto t = read_neighbors(in);
    check_key(t, corpus, mu);
    return t;
}

RendererLookup::RendererLookup(const DocumentRenderers& renderers, const NeighborTable* table)
    : renderers_(&renderers), table_(table) {
    if (table_ && (table_->corpus_hash != renderers.corpus().hash() || table_->mu != renderers.mu()))
        throw ArtifactMismatch("neighbor table does not match the corpus or mu in use");
}

std::vector<ScoredId> RendererLookup::of_document(DocId d, std::size_t k) const {
    const auto& corpus = renderers_->corpus();
    k = std::min(k, corpus.size());
    if (table_ && k <= table_->k_max) {
        const auto& list = table_->lists.at(d);
        return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size()))};
    }
    return renderers_->top(corpus.document(d).counts, k);
}

}  // namespace pseudoq
