#include "pseudoq/trec.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "pseudoq/error.hpp"

namespace pseudoq {

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

// Finds `tag` at or after `from`, but only before `limit`.
std::size_t find_in(std::string_view data, std::string_view tag, std::size_t from, std::size_t limit) {
    auto pos = data.find(tag, from);
    return (pos == std::string_view::npos || pos + tag.size() > limit) ? std::string_view::npos : pos;
}

}  // namespace

std::vector<RawDocument> parse_trec(std::string_view data) {
    static constexpr std::string_view kOpen = "<DOC>", kClose = "</DOC>";
    static constexpr std::string_view kNoOpen = "<DOCNO>", kNoClose = "</DOCNO>";
    static constexpr std::string_view kTextOpen = "<TEXT>", kTextClose = "</TEXT>";

    std::vector<RawDocument> docs;
    std::size_t pos = 0;
    std::size_t block = 0;
    while ((pos = data.find(kOpen, pos)) != std::string_view::npos) {
        const std::size_t body = pos + kOpen.size();
        const std::size_t end = data.find(kClose, body);
        if (end == std::string_view::npos) throw ParseError("unclosed <DOC> block", pos);

        auto no = find_in(data, kNoOpen, body, end);
        if (no == std::string_view::npos)
            throw ParseError("missing <DOCNO> in DOC block index " + std::to_string(block), pos);
        auto no_end = find_in(data, kNoClose, no, end);
        if (no_end == std::string_view::npos) throw ParseError("unclosed <DOCNO>", no);

        RawDocument doc;
        doc.docno = std::string(trim(data.substr(no + kNoOpen.size(), no_end - no - kNoOpen.size())));
        if (doc.docno.empty()) throw ParseError("empty <DOCNO> in DOC block index " + std::to_string(block), no);

        std::size_t t = body;
        bool first = true;
        while ((t = find_in(data, kTextOpen, t, end)) != std::string_view::npos) {
            auto t_end = find_in(data, kTextClose, t, end);
            if (t_end == std::string_view::npos) throw ParseError("unclosed <TEXT> section", t);
            if (!first) doc.text.push_back('\n');
            doc.text.append(data.substr(t + kTextOpen.size(), t_end - t - kTextOpen.size()));
            first = false;
            t = t_end + kTextClose.size();
        }
        docs.push_back(std::move(doc));
        pos = end + kClose.size();
        ++block;
    }
    return docs;
}

std::vector<RawDocument> parse_trec(std::istream& in) {
    std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_trec(data);
}

std::vector<RawDocument> parse_lines(std::string_view data) {
    std::vector<RawDocument> docs;
    std::size_t k = 0;
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        auto line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++k;
        docs.push_back({"L" + std::to_string(k), std::string(line)});
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return docs;
}

std::vector<RawTopic> parse_topics(std::string_view data) {
    std::vector<RawTopic> topics;
    std::size_t pos = 0;
    while ((pos = data.find("<top>", pos)) != std::string_view::npos) {
        auto end = data.find("</top>", pos);
        if (end == std::string_view::npos) throw ParseError("unclosed <top> block", pos);
        auto block = data.substr(pos, end - pos);

        // Field content runs to the next tag.
        auto field = [&](std::string_view tag) -> std::string_view {
            auto f = block.find(tag);
            if (f == std::string_view::npos) return {};
            f += tag.size();
            auto stop = block.find('<', f);
            return trim(block.substr(f, stop == std::string_view::npos ? std::string_view::npos : stop - f));
        };

        RawTopic topic;
        auto num = field("<num>");
        if (num.starts_with("Number:")) num = trim(num.substr(7));
        num = num.substr(0, num.find_first_of(kSpace));
        if (num.empty()) throw ParseError("topic without <num>", pos);
        // Numeric ids lose zero padding so "001" matches qrels id "1".
        if (num.find_first_not_of("0123456789") == std::string_view::npos)
            while (num.size() > 1 && num.front() == '0') num.remove_prefix(1);
        topic.id = std::string(num);

        auto title = field("<title>");
        if (title.starts_with("Topic:")) title = trim(title.substr(6));
        topic.title = std::string(title);
        topics.push_back(std::move(topic));
        pos = end + 6;
    }
    return topics;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pseudoq
