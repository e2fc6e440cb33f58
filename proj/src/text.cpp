#include "pseudoq/text.hpp"

#include <cctype>
#include <fstream>

#include "pseudoq/error.hpp"

namespace pseudoq {

std::string_view to_string(Stemmer s) {
    switch (s) {
        case Stemmer::none: return "none";
        case Stemmer::porter: return "porter";
        case Stemmer::krovetz: return "krovetz";
    }
    return "none";
}

Stemmer parse_stemmer(std::string_view name) {
    if (name == "none") return Stemmer::none;
    if (name == "porter") return Stemmer::porter;
    if (name == "krovetz") return Stemmer::krovetz;
    throw ConfigError("unknown stemmer '" + std::string(name) + "' (expected none|porter|krovetz)");
}

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Working buffer for the Porter algorithm. `end` is the length of the
// current word; suffix tests look at word[0, end).
class PorterWord {
  public:
    explicit PorterWord(std::string_view w) : w_(w) {}

    std::string str() const { return w_; }

    bool consonant(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !consonant(i - 1);
            default: return true;
        }
    }

    // m() in [C](VC)^m[V] for the prefix of length `len`.
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && consonant(i)) ++i;
        while (i < len) {
            while (i < len && !consonant(i)) ++i;
            if (i >= len) break;
            while (i < len && consonant(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!consonant(i)) return true;
        return false;
    }

    bool double_consonant(std::size_t len) const {
        return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
    }

    // *o: stem ends cvc where the final c is not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
        char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends_with(std::string_view s) const {
        return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
    }

    std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

    void replace_suffix(std::string_view suffix, std::string_view repl) {
        w_.erase(w_.size() - suffix.size());
        w_.append(repl);
    }

    char back() const { return w_.back(); }
    void pop_back() { w_.pop_back(); }
    void push_back(char c) { w_.push_back(c); }
    std::size_t size() const { return w_.size(); }

  private:
    std::string w_;
};

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Applies the longest matching rule whose stem has measure > min_measure.
// Only the longest match is considered; if its condition fails the word is
// left alone.
template <std::size_t N>
void apply_longest(PorterWord& w, const Rule (&rules)[N], int min_measure) {
    const Rule* best = nullptr;
    for (const auto& r : rules)
        if (w.ends_with(r.suffix) && (!best || r.suffix.size() > best->suffix.size())) best = &r;
    if (best && w.measure(w.stem_len(best->suffix)) > min_measure) w.replace_suffix(best->suffix, best->replacement);
}

void step1a(PorterWord& w) {
    if (w.ends_with("sses")) w.replace_suffix("sses", "ss");
    else if (w.ends_with("ies")) w.replace_suffix("ies", "i");
    else if (w.ends_with("ss")) return;
    else if (w.ends_with("s")) w.replace_suffix("s", "");
}

void step1b(PorterWord& w) {
    if (w.ends_with("eed")) {
        if (w.measure(w.stem_len("eed")) > 0) w.replace_suffix("eed", "ee");
        return;
    }
    std::string_view removed;
    if (w.ends_with("ed") && w.has_vowel(w.stem_len("ed"))) removed = "ed";
    else if (w.ends_with("ing") && w.has_vowel(w.stem_len("ing"))) removed = "ing";
    if (removed.empty()) return;
    w.replace_suffix(removed, "");

    if (w.ends_with("at")) w.replace_suffix("at", "ate");
    else if (w.ends_with("bl")) w.replace_suffix("bl", "ble");
    else if (w.ends_with("iz")) w.replace_suffix("iz", "ize");
    else if (w.double_consonant(w.size())) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (w.measure(w.size()) == 1 && w.cvc(w.size())) {
        w.push_back('e');
    }
}

void step1c(PorterWord& w) {
    if (w.ends_with("y") && w.has_vowel(w.stem_len("y"))) w.replace_suffix("y", "i");
}

constexpr Rule kStep2[] = {
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},   {"izer", "ize"},
    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},       {"ousli", "ous"},
    {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
    {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
};

constexpr Rule kStep3[] = {
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
};

constexpr std::string_view kStep4[] = {
    "al",  "ance", "ence", "er", "ic",  "able", "ible", "ant", "ement", "ment",
    "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
};

void step4(PorterWord& w) {
    std::string_view best;
    for (auto s : kStep4)
        if (w.ends_with(s) && s.size() > best.size()) best = s;
    if (best.empty()) return;
    std::size_t len = w.stem_len(best);
    if (w.measure(len) <= 1) return;
    if (best == "ion") {
        std::string s = w.str();
        if (len == 0 || (s[len - 1] != 's' && s[len - 1] != 't')) return;
    }
    w.replace_suffix(best, "");
}

void step5(PorterWord& w) {
    if (w.ends_with("e")) {
        std::size_t len = w.stem_len("e");
        int m = w.measure(len);
        if (m > 1 || (m == 1 && !w.cvc(len))) w.pop_back();
    }
    if (w.measure(w.size()) > 1 && w.double_consonant(w.size()) && w.back() == 'l') w.pop_back();
}

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.empty()) return {};
    PorterWord w(word);
    step1a(w);
    if (w.size() == 0) return {};
    step1b(w);
    step1c(w);
    apply_longest(w, kStep2, 0);
    apply_longest(w, kStep3, 0);
    step4(w);
    step5(w);
    return w.str();
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessOptions& opts) {
    if (opts.stemmer == Stemmer::krovetz) throw ConfigError("the krovetz stemmer is not available in this build");
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_alnum(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && is_alnum(text[i])) ++i;
        if (start == i) continue;
        std::string tok(text.substr(start, i - start));
        if (opts.lowercase)
            for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (opts.stoplist.contains(tok)) continue;
        if (opts.drop_length_one && tok.size() == 1) continue;
        if (opts.stemmer == Stemmer::porter) tok = porter_stem(tok);
        if (!tok.empty()) out.push_back(std::move(tok));
    }
    return out;
}

std::set<std::string> load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stoplist '" + path + "'");
    std::set<std::string> words;
    std::string w;
    while (in >> w) words.insert(w);
    return words;
}

}  // namespace pseudoq
