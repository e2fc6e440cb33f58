#include "pseudoq/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"

namespace pseudoq {

TermCounts TermCounts::from_pairs(std::vector<TermCount> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    TermCounts tc;
    for (const auto& p : pairs) {
        if (p.count == 0) continue;
        if (!tc.entries_.empty() && tc.entries_.back().term == p.term) tc.entries_.back().count += p.count;
        else tc.entries_.push_back(p);
        tc.length_ += p.count;
    }
    return tc;
}

TermCounts TermCounts::from_terms(std::span<const TermId> terms) {
    std::vector<TermCount> pairs;
    pairs.reserve(terms.size());
    for (auto t : terms) pairs.push_back({t, 1});
    return from_pairs(std::move(pairs));
}

std::uint32_t TermCounts::count(TermId term) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                               [](const TermCount& e, TermId t) { return e.term < t; });
    return (it != entries_.end() && it->term == term) ? it->count : 0;
}

TermCounts& TermCounts::operator+=(const TermCounts& other) {
    std::vector<TermCount> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.cbegin();
    auto b = other.entries_.cbegin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->term < b->term)) merged.push_back(*a++);
        else if (a == entries_.end() || b->term < a->term) merged.push_back(*b++);
        else merged.push_back({a->term, (a++)->count + (b++)->count});
    }
    entries_ = std::move(merged);
    length_ += other.length_;
    return *this;
}

Corpus::Corpus(std::vector<Document> documents, std::vector<std::string> vocabulary, PreprocessOptions options)
    : documents_(std::move(documents)), vocabulary_(std::move(vocabulary)), options_(std::move(options)) {
    for (std::size_t i = 1; i < vocabulary_.size(); ++i)
        if (!(vocabulary_[i - 1] < vocabulary_[i])) throw DataError("vocabulary is not strictly sorted");
    term_ids_.reserve(vocabulary_.size());
    for (TermId t = 0; t < vocabulary_.size(); ++t) term_ids_.emplace(vocabulary_[t], t);

    collection_counts_.assign(vocabulary_.size(), 0);
    postings_.assign(vocabulary_.size(), {});
    for (DocId d = 0; d < documents_.size(); ++d) {
        auto& doc = documents_[d];
        if (doc.id != d) throw DataError("document ids must be 0..n-1 in order");
        if (doc.counts.empty()) throw DataError("document '" + doc.docno + "' is empty");
        if (!docnos_.emplace(doc.docno, d).second) throw DataError("duplicate docno " + doc.docno);
        for (const auto& e : doc.counts.entries()) {
            if (e.term >= vocabulary_.size()) throw DataError("term id out of range in '" + doc.docno + "'");
            collection_counts_[e.term] += e.count;
            postings_[e.term].push_back({d, e.count});
        }
        collection_length_ += doc.length();
    }

    std::ostringstream ss;
    save_index(*this, ss);
    hash_ = fnv1a_hex(ss.str());
}

std::optional<DocId> Corpus::find_docno(std::string_view docno) const {
    auto it = docnos_.find(std::string(docno));
    if (it == docnos_.end()) return std::nullopt;
    return it->second;
}

std::optional<TermId> Corpus::term_id(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
}

double Corpus::collection_prob(TermId t) const {
    if (t >= collection_counts_.size() || collection_length_ == 0) return 0.0;
    return static_cast<double>(collection_counts_[t]) / static_cast<double>(collection_length_);
}

CorpusBuild build_corpus(const std::vector<RawDocument>& docs, const PreprocessOptions& opts) {
    {
        std::map<std::string_view, int> seen;
        std::vector<std::string> dups;
        for (const auto& d : docs)
            if (++seen[d.docno] == 2) dups.push_back(d.docno);
        if (!dups.empty()) {
            std::string msg = "duplicate docno";
            for (const auto& d : dups) msg += " " + d;
            throw DataError(msg);
        }
    }

    CorpusBuild result;
    std::vector<std::vector<std::string>> tokens;
    std::vector<const RawDocument*> kept;
    std::map<std::string, TermId> vocab;
    for (const auto& d : docs) {
        auto toks = tokenize(d.text, opts);
        if (toks.empty()) {
            result.excluded.push_back(d.docno);
            continue;
        }
        for (const auto& t : toks) vocab.emplace(t, 0);
        tokens.push_back(std::move(toks));
        kept.push_back(&d);
    }

    std::vector<std::string> vocabulary;
    vocabulary.reserve(vocab.size());
    for (auto& [term, id] : vocab) {
        id = static_cast<TermId>(vocabulary.size());
        vocabulary.push_back(term);
    }

    std::vector<Document> documents;
    documents.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        std::vector<TermId> ids;
        ids.reserve(tokens[i].size());
        for (const auto& t : tokens[i]) ids.push_back(vocab.at(t));
        documents.push_back({static_cast<DocId>(i), kept[i]->docno, TermCounts::from_terms(ids)});
    }
    result.corpus = Corpus(std::move(documents), std::move(vocabulary), opts);
    return result;
}

Query make_query(const Corpus& corpus, std::string id, std::string_view text) {
    Query q;
    q.id = std::move(id);
    for (const auto& tok : tokenize(text, corpus.options())) {
        if (auto t = corpus.term_id(tok)) q.tokens.push_back(*t);
        else diagnostic("query " + q.id + ": term '" + tok + "' is not in the vocabulary; dropped");
    }
    if (q.tokens.empty()) throw DataError("query " + q.id + " is empty after preprocessing");
    q.counts = TermCounts::from_terms(q.tokens);
    return q;
}

// Index format (text, line oriented):
//   pseudoq-index 1
//   options lowercase=<0|1> stemmer=<name> drop_length_one=<0|1>
//   stoplist <n> <word>...
//   vocabulary <V>
//   <term>                       x V
//   documents <n>
//   <docno> <unique> <tid>:<count> ...   x n
//   end
void save_index(const Corpus& corpus, std::ostream& out) {
    const auto& o = corpus.options();
    out << "pseudoq-index 1\n";
    out << "options lowercase=" << o.lowercase << " stemmer=" << to_string(o.stemmer)
        << " drop_length_one=" << o.drop_length_one << '\n';
    out << "stoplist " << o.stoplist.size();
    for (const auto& w : o.stoplist) out << ' ' << w;
    out << '\n';
    out << "vocabulary " << corpus.vocabulary_size() << '\n';
    for (const auto& t : corpus.vocabulary()) out << t << '\n';
    out << "documents " << corpus.size() << '\n';
    for (const auto& d : corpus.documents()) {
        if (d.docno.find_first_of(" \t\r\n") != std::string::npos)
            throw DataError("docno '" + d.docno + "' contains whitespace and cannot be persisted");
        out << d.docno << ' ' << d.counts.unique_terms();
        for (const auto& e : d.counts.entries()) out << ' ' << e.term << ':' << e.count;
        out << '\n';
    }
    out << "end\n";
}

namespace {

void expect(std::istream& in, std::string_view word) {
    std::string got;
    if (!(in >> got) || got != word) throw ParseError("index: expected '" + std::string(word) + "', got '" + got + "'");
}

bool parse_flag(const std::string& kv, std::string_view key) {
    if (!kv.starts_with(std::string(key) + "=")) throw ParseError("index: expected option " + std::string(key));
    auto v = kv.substr(key.size() + 1);
    if (v != "0" && v != "1") throw ParseError("index: bad flag value for " + std::string(key));
    return v == "1";
}

}  // namespace

Corpus load_index(std::istream& in) {
    expect(in, "pseudoq-index");
    int version = 0;
    in >> version;
    if (version != 1) throw ParseError("index: unsupported version " + std::to_string(version));

    PreprocessOptions opts;
    expect(in, "options");
    std::string a, b, c;
    in >> a >> b >> c;
    opts.lowercase = parse_flag(a, "lowercase");
    if (!b.starts_with("stemmer=")) throw ParseError("index: expected stemmer option");
    opts.stemmer = parse_stemmer(b.substr(8));
    opts.drop_length_one = parse_flag(c, "drop_length_one");

    expect(in, "stoplist");
    std::size_t n = 0;
    in >> n;
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        in >> w;
        opts.stoplist.insert(w);
    }

    expect(in, "vocabulary");
    std::size_t v = 0;
    in >> v;
    std::vector<std::string> vocab(v);
    for (auto& t : vocab) in >> t;

    expect(in, "documents");
    std::size_t nd = 0;
    in >> nd;
    std::vector<Document> docs;
    docs.reserve(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        Document doc;
        doc.id = static_cast<DocId>(d);
        std::size_t k = 0;
        in >> doc.docno >> k;
        std::vector<TermCount> pairs(k);
        for (auto& p : pairs) {
            char colon = 0;
            in >> p.term >> colon >> p.count;
            if (colon != ':') throw ParseError("index: malformed posting in document " + doc.docno);
        }
        doc.counts = TermCounts::from_pairs(std::move(pairs));
        docs.push_back(std::move(doc));
    }
    expect(in, "end");
    if (!in) throw ParseError("index: truncated file");
    return Corpus(std::move(docs), std::move(vocab), std::move(opts));
}

void save_index(const Corpus& corpus, const std::string& path) {
    std::ostringstream ss;
    save_index(corpus, ss);
    write_file_atomic(path, ss.str());
}

Corpus load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open index '" + path + "'");
    return load_index(in);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, std::string_view contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace pseudoq
