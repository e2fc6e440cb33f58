#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pseudoq/text.hpp"
#include "pseudoq/trec.hpp"

namespace pseudoq {

using TermId = std::uint32_t;
using DocId = std::uint32_t;

struct TermCount {
    TermId term;
    std::uint32_t count;

    bool operator==(const TermCount&) const = default;
};

/// Sparse bag of words, sorted by term id, no zero entries.
class TermCounts {
  public:
    TermCounts() = default;

    /// Builds from unsorted (term, count) pairs; duplicates are summed.
    static TermCounts from_pairs(std::vector<TermCount> pairs);
    static TermCounts from_terms(std::span<const TermId> terms);

    std::span<const TermCount> entries() const { return entries_; }
    std::uint64_t length() const { return length_; }
    std::size_t unique_terms() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::uint32_t count(TermId term) const;

    /// Count-wise sum, as used for cluster texts.
    TermCounts& operator+=(const TermCounts& other);

    bool operator==(const TermCounts&) const = default;

  private:
    std::vector<TermCount> entries_;
    std::uint64_t length_ = 0;
};

struct Document {
    DocId id = 0;
    std::string docno;
    TermCounts counts;

    std::uint64_t length() const { return counts.length(); }
};

struct Posting {
    DocId doc;
    std::uint32_t count;
};

/// Immutable indexed document collection. Term ids follow the lexicographic
/// order of the vocabulary; doc ids follow ingestion order.
class Corpus {
  public:
    Corpus() = default;
    Corpus(std::vector<Document> documents, std::vector<std::string> vocabulary, PreprocessOptions options);

    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }
    const std::vector<Document>& documents() const { return documents_; }
    const Document& document(DocId id) const { return documents_.at(id); }
    std::optional<DocId> find_docno(std::string_view docno) const;

    std::span<const std::string> vocabulary() const { return vocabulary_; }
    std::size_t vocabulary_size() const { return vocabulary_.size(); }
    std::optional<TermId> term_id(std::string_view term) const;
    const std::string& term(TermId id) const { return vocabulary_.at(id); }

    std::uint64_t collection_count(TermId t) const { return collection_counts_.at(t); }
    std::uint64_t collection_length() const { return collection_length_; }
    /// MLE of `t` in the whole collection; 0 outside the vocabulary.
    double collection_prob(TermId t) const;
    std::uint32_t document_frequency(TermId t) const { return static_cast<std::uint32_t>(postings_.at(t).size()); }
    std::span<const Posting> postings(TermId t) const { return postings_.at(t); }

    const PreprocessOptions& options() const { return options_; }

    /// Hex FNV-1a digest of the serialized index; keys derived artifacts.
    const std::string& hash() const { return hash_; }

  private:
    std::vector<Document> documents_;
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::unordered_map<std::string, DocId> docnos_;
    std::vector<std::uint64_t> collection_counts_;
    std::vector<std::vector<Posting>> postings_;
    std::uint64_t collection_length_ = 0;
    PreprocessOptions options_;
    std::string hash_;
};

struct CorpusBuild {
    Corpus corpus;
    std::vector<std::string> excluded;  // docnos that were empty after preprocessing
};

/// Tokenizes and indexes `docs`. Throws DataError listing a duplicate docno.
CorpusBuild build_corpus(const std::vector<RawDocument>& docs, const PreprocessOptions& opts);

struct Query {
    std::string id;
    std::vector<TermId> tokens;  // in query order, repeats kept
    TermCounts counts;

    std::size_t size() const { return tokens.size(); }
};

/// Preprocesses `text` with the corpus options. Terms outside the
/// vocabulary are dropped with a diagnostic; throws DataError when nothing
/// remains.
Query make_query(const Corpus& corpus, std::string id, std::string_view text);

void save_index(const Corpus& corpus, std::ostream& out);
Corpus load_index(std::istream& in);
void save_index(const Corpus& corpus, const std::string& path);
Corpus load_index(const std::string& path);

std::string fnv1a_hex(std::string_view bytes);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace pseudoq
