#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pseudoq {

enum class Stemmer {
    none,
    porter,
    krovetz,  // reserved; needs a dictionary asset that is not shipped
};

std::string_view to_string(Stemmer s);
Stemmer parse_stemmer(std::string_view name);

/// Text normalization applied identically to documents and queries. The
/// options are stored in the index so that queries can be replayed.
struct PreprocessOptions {
    bool lowercase = true;
    Stemmer stemmer = Stemmer::none;
    std::set<std::string> stoplist;
    bool drop_length_one = false;

    bool operator==(const PreprocessOptions&) const = default;
};

/// Splits `text` into maximal ASCII alphanumeric runs, then lowercases,
/// filters stopwords and length-one tokens, and stems, in that order.
std::vector<std::string> tokenize(std::string_view text, const PreprocessOptions& opts);

/// The original Porter (1980) suffix-stripping algorithm. Input is expected
/// to be lowercase.
std::string porter_stem(std::string_view word);

/// Reads a whitespace-separated stopword list.
std::set<std::string> load_stoplist(const std::string& path);

}  // namespace pseudoq
