#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pseudoq/corpus.hpp"
#include "pseudoq/lm.hpp"

namespace pseudoq {

/// Nearest-neighbor cluster seeded by one document. Its text is the
/// count-sum of the members.
struct Cluster {
    std::uint32_t id = 0;           // seed doc id
    std::vector<DocId> members;     // ascending
    TermCounts counts;
    // Members ranked as renderers of the cluster text, and the sum of their
    // rendition scores.
    std::vector<ScoredId> member_renderers;
    double member_norm = 0;
};

class ClusterIndex {
  public:
    ClusterIndex() = default;

    /// Builds clusters with explicit memberships (one list per seed); used
    /// for the top-delta construction and for hand-made configurations such
    /// as the singleton partition.
    static ClusterIndex from_members(const Corpus& corpus, double mu, std::size_t delta,
                                     std::vector<std::vector<DocId>> members, unsigned threads = 1);

    std::size_t size() const { return clusters_.size(); }
    const std::vector<Cluster>& clusters() const { return clusters_; }
    const Cluster& cluster(std::uint32_t id) const { return clusters_.at(id); }
    /// Clusters that contain `doc`, ascending.
    const std::vector<std::uint32_t>& containing(DocId doc) const { return containing_.at(doc); }

    const std::string& corpus_hash() const { return corpus_hash_; }
    double mu() const { return mu_; }
    std::size_t delta() const { return delta_; }

  private:
    std::string corpus_hash_;
    double mu_ = 0;
    std::size_t delta_ = 0;
    std::vector<Cluster> clusters_;
    std::vector<std::vector<std::uint32_t>> containing_;
};

/// One cluster per document: the seed's top-delta document renderers (the
/// seed itself is a member only if it ranks among them). Throws DataError if
/// delta exceeds the neighbor table's k_max.
ClusterIndex build_clusters(const Corpus& corpus, const NeighborTable& neighbors, std::size_t delta,
                            unsigned threads = 1);

/// Clusters that text `text_id` belongs to. In the first round the query
/// belongs to every cluster.
std::vector<std::uint32_t> cluster_membership(const ClusterIndex& index, std::uint32_t text_id, bool first_round);

/// How many clusters contain their own seed.
std::size_t count_self_members(const ClusterIndex& index);

void save_clusters(const ClusterIndex& index, std::ostream& out);
/// Throws ArtifactMismatch unless the key equals (corpus hash, mu, delta).
ClusterIndex load_clusters(std::istream& in, const Corpus& corpus, double mu, std::size_t delta, unsigned threads = 1);

}  // namespace pseudoq
