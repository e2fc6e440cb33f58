#include "pseudoq/clustering.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "pseudoq/error.hpp"
#include "pseudoq/parallel.hpp"

namespace pseudoq {

ClusterIndex ClusterIndex::from_members(const Corpus& corpus, double mu, std::size_t delta,
                                        std::vector<std::vector<DocId>> members, unsigned threads) {
    if (!(mu > 0)) throw DataError("clusters require mu > 0");
    if (members.size() != corpus.size()) throw DataError("one member list per document is required");

    ClusterIndex index;
    index.corpus_hash_ = corpus.hash();
    index.mu_ = mu;
    index.delta_ = delta;
    index.clusters_.resize(members.size());
    parallel_for(members.size(), threads, [&](std::size_t c) {
        auto& cl = index.clusters_[c];
        cl.id = static_cast<std::uint32_t>(c);
        cl.members = std::move(members[c]);
        std::sort(cl.members.begin(), cl.members.end());
        if (cl.members.empty()) throw DataError("cluster " + std::to_string(c) + " has no members");
        if (std::adjacent_find(cl.members.begin(), cl.members.end()) != cl.members.end())
            throw DataError("cluster " + std::to_string(c) + " lists a member twice");
        for (DocId d : cl.members) {
            if (d >= corpus.size()) throw DataError("cluster member outside the corpus");
            cl.counts += corpus.document(d).counts;
        }
        for (DocId d : cl.members)
            cl.member_renderers.push_back({d, rendition_prob(cl.counts, corpus.document(d).counts, mu, corpus)});
        std::sort(cl.member_renderers.begin(), cl.member_renderers.end(), ranks_before);
        for (const auto& r : cl.member_renderers) cl.member_norm += r.score;
    });

    index.containing_.assign(corpus.size(), {});
    for (const auto& cl : index.clusters_)
        for (DocId d : cl.members) index.containing_[d].push_back(cl.id);
    return index;
}

ClusterIndex build_clusters(const Corpus& corpus, const NeighborTable& neighbors, std::size_t delta,
                            unsigned threads) {
    if (delta == 0 || delta > corpus.size())
        throw DataError("cluster size delta=" + std::to_string(delta) + " must lie in [1, " +
                        std::to_string(corpus.size()) + "]");
    if (neighbors.corpus_hash != corpus.hash()) throw ArtifactMismatch("neighbor table belongs to a different corpus");
    if (delta > neighbors.k_max)
        throw DataError("delta=" + std::to_string(delta) + " exceeds the neighbor table's k_max=" +
                        std::to_string(neighbors.k_max) + "; recompute neighbors with k_max >= delta");
    std::vector<std::vector<DocId>> members(corpus.size());
    for (DocId d = 0; d < corpus.size(); ++d)
        for (std::size_t i = 0; i < delta; ++i) members[d].push_back(neighbors.lists[d][i].id);
    return ClusterIndex::from_members(corpus, neighbors.mu, delta, std::move(members), threads);
}

std::vector<std::uint32_t> cluster_membership(const ClusterIndex& index, std::uint32_t text_id, bool first_round) {
    if (text_id == kQueryTextId) {
        if (!first_round) throw DataError("the query is not a pseudo-query after the first round");
        std::vector<std::uint32_t> all(index.size());
        for (std::uint32_t c = 0; c < all.size(); ++c) all[c] = c;
        return all;
    }
    if (text_id >= index.size()) throw DataError("document id " + std::to_string(text_id) + " is outside the corpus");
    return index.containing(text_id);
}

std::size_t count_self_members(const ClusterIndex& index) {
    return static_cast<std::size_t>(std::count_if(index.clusters().begin(), index.clusters().end(), [](const Cluster& c) {
        return std::binary_search(c.members.begin(), c.members.end(), c.id);
    }));
}

void save_clusters(const ClusterIndex& index, std::ostream& out) {
    out << "pseudoq-clusters 1\n";
    out << "corpus " << index.corpus_hash() << '\n';
    out << "mu " << format_double_exact(index.mu()) << '\n';
    out << "delta " << index.delta() << '\n';
    out << "clusters " << index.size() << '\n';
    for (const auto& c : index.clusters()) {
        out << c.members.size();
        for (DocId d : c.members) out << ' ' << d;
        out << '\n';
    }
    out << "end\n";
}

ClusterIndex load_clusters(std::istream& in, const Corpus& corpus, double mu, std::size_t delta, unsigned threads) {
    auto expect = [&](std::string_view word) {
        std::string got;
        if (!(in >> got) || got != word) throw ParseError("clusters: expected '" + std::string(word) + "'");
    };
    expect("pseudoq-clusters");
    int version = 0;
    in >> version;
    if (version != 1) throw ParseError("clusters: unsupported version");
    std::string hash, mu_text;
    std::size_t stored_delta = 0, n = 0;
    expect("corpus");
    in >> hash;
    expect("mu");
    in >> mu_text;
    expect("delta");
    in >> stored_delta;
    expect("clusters");
    in >> n;
    if (hash != corpus.hash()) throw ArtifactMismatch("cluster index was built for corpus " + hash);
    if (parse_double_exact(mu_text) != mu) throw ArtifactMismatch("cluster index was built with mu=" + mu_text);
    if (stored_delta != delta)
        throw ArtifactMismatch("cluster index has delta=" + std::to_string(stored_delta) + ", requested " +
                               std::to_string(delta));
    std::vector<std::vector<DocId>> members(n);
    for (auto& m : members) {
        std::size_t k = 0;
        in >> k;
        m.resize(k);
        for (auto& d : m) in >> d;
    }
    expect("end");
    return ClusterIndex::from_members(corpus, mu, delta, std::move(members), threads);
}

}  // namespace pseudoq
