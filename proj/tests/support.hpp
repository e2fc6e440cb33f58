#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pseudoq/corpus.hpp"
#include "pseudoq/scoring.hpp"

namespace pseudoq::testing {

/// Corpus with docnos D0, D1, ... and default preprocessing.
inline Corpus corpus_of(const std::vector<std::string>& texts) {
    std::vector<RawDocument> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({"D" + std::to_string(i), texts[i]});
    return build_corpus(docs, PreprocessOptions{}).corpus;
}

/// Term names sort in index order: t00 < t01 < ...
inline std::string term_name(std::size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "t%02zu", i);
    return buf;
}

/// Zipf-ish random text over `vocab` terms.
inline std::string random_text(std::mt19937_64& rng, std::size_t vocab, std::size_t length) {
    std::vector<double> w;
    for (std::size_t i = 0; i < vocab; ++i) w.push_back(1.0 / static_cast<double>(i + 1));
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::string s;
    for (std::size_t i = 0; i < length; ++i) s += (i ? " " : "") + term_name(pick(rng));
    return s;
}

/// Random corpus; a few documents are exact copies of others so that ties occur.
inline Corpus random_corpus(std::mt19937_64& rng, std::size_t docs, std::size_t vocab, std::size_t min_len = 2,
                            std::size_t max_len = 12) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < docs; ++i) {
        if (i > 1 && rng() % 8 == 0) texts.push_back(texts[rng() % i]);
        else texts.push_back(random_text(rng, vocab, len(rng)));
    }
    return corpus_of(texts);
}

/// Random query drawn from the corpus vocabulary.
inline Query random_query(std::mt19937_64& rng, const Corpus& corpus, std::size_t length) {
    std::string text;
    for (std::size_t i = 0; i < length; ++i)
        text += (i ? " " : "") + corpus.term(static_cast<TermId>(rng() % corpus.vocabulary_size()));
    return make_query(corpus, "Q", text);
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

/// Same ids in the same order and scores within `tol` relative error.
inline bool rankings_match(const ScoredRanking& a, const ScoredRanking& b, double tol = 1e-10) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.entries[i].id != b.entries[i].id) return false;
        if (relative_error(a.entries[i].score, b.entries[i].score) > tol) return false;
    }
    return true;
}

}  // namespace pseudoq::testing
