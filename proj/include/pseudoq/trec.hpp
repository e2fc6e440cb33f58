#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace pseudoq {

struct RawDocument {
    std::string docno;
    std::string text;

    bool operator==(const RawDocument&) const = default;
};

struct RawTopic {
    std::string id;
    std::string title;
};

/// Parses TREC SGML: one entry per <DOC>...</DOC> block, with the trimmed
/// DOCNO and the concatenation of every <TEXT> section. Throws ParseError on
/// unclosed blocks (with the byte offset) or a block without DOCNO.
std::vector<RawDocument> parse_trec(std::string_view data);
std::vector<RawDocument> parse_trec(std::istream& in);

/// One document per line; line k (1-based) becomes docno "L<k>".
std::vector<RawDocument> parse_lines(std::string_view data);

/// Extracts (number, title) from TREC <top> blocks. "Number:" and "Topic:"
/// prefixes are stripped; all-digit numbers lose leading zeros.
std::vector<RawTopic> parse_topics(std::string_view data);

std::string read_file(const std::string& path);

}  // namespace pseudoq
