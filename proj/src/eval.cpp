#include "pseudoq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pseudoq/error.hpp"

namespace pseudoq {

namespace {

std::vector<std::string_view> split_lines(std::string_view data) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        auto line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> fields(std::string_view line) {
    std::istringstream ss{std::string(line)};
    std::vector<std::string> out;
    for (std::string f; ss >> f;) out.push_back(std::move(f));
    return out;
}

}  // namespace

Qrels parse_qrels(std::string_view data) {
    Qrels qrels;
    std::size_t lineno = 0;
    for (auto line : split_lines(data)) {
        ++lineno;
        auto f = fields(line);
        if (f.empty()) continue;
        if (f.size() != 4) throw ParseError("qrels line " + std::to_string(lineno) + ": expected 4 fields");
        int rel = 0;
        try {
            rel = std::stoi(f[3]);
        } catch (...) {
            throw ParseError("qrels line " + std::to_string(lineno) + ": bad relevance value");
        }
        auto& set = qrels[f[0]];
        if (rel > 0) set.insert(f[2]);
    }
    return qrels;
}

RunRankings parse_run(std::string_view data) {
    struct Entry {
        std::string docno;
        long rank;
        double score;
        std::size_t order;
    };
    std::map<std::string, std::vector<Entry>> entries;
    std::size_t lineno = 0;
    for (auto line : split_lines(data)) {
        ++lineno;
        auto f = fields(line);
        if (f.empty()) continue;
        if (f.size() != 6) throw ParseError("run line " + std::to_string(lineno) + ": expected 6 fields");
        Entry e;
        e.docno = f[2];
        e.order = lineno;
        try {
            e.rank = std::stol(f[3]);
            e.score = std::stod(f[4]);
        } catch (...) {
            throw ParseError("run line " + std::to_string(lineno) + ": bad rank or score");
        }
        entries[f[0]].push_back(std::move(e));
    }
    RunRankings run;
    for (auto& [qid, list] : entries) {
        std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.order < b.order;
        });
        std::set<std::string_view> seen;
        auto& out = run[qid];
        for (const auto& e : list) {
            if (!seen.insert(e.docno).second)
                throw ParseError("run: docno " + e.docno + " appears twice for query " + qid);
            out.push_back(e.docno);
        }
    }
    return run;
}

double average_precision(std::span<const std::string> run, const std::set<std::string>& relevant, std::size_t depth) {
    if (relevant.empty()) throw DataError("average_precision: no relevant documents");
    double sum = 0;
    std::size_t hits = 0;
    const std::size_t n = std::min(depth, run.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (relevant.contains(run[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

std::size_t relevant_retrieved(std::span<const std::string> run, const std::set<std::string>& relevant,
                               std::size_t depth) {
    const std::size_t n = std::min(depth, run.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += relevant.contains(run[i]) ? 1 : 0;
    return hits;
}

double recall_at(std::span<const std::string> run, const std::set<std::string>& relevant, std::size_t depth) {
    if (relevant.empty()) throw DataError("recall_at: no relevant documents");
    return static_cast<double>(relevant_retrieved(run, relevant, depth)) / static_cast<double>(relevant.size());
}

WilcoxonResult wilcoxon_two_sided(std::span<const double> a, std::span<const double> b, double level) {
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) nonzero += (a[i] - b[i] != 0.0) ? 1 : 0;
    return wilcoxon_two_sided(a, b, level, nonzero <= 25);
}

WilcoxonResult wilcoxon_two_sided(std::span<const double> a, std::span<const double> b, double level, bool exact) {
    if (a.size() != b.size()) throw DataError("wilcoxon: samples must be paired");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (double d = a[i] - b[i]; d != 0.0) diffs.push_back(d);

    WilcoxonResult res;
    res.n = diffs.size();
    res.exact = exact;
    if (res.n < 5) return res;
    res.sufficient = true;

    // Doubled mid-ranks keep every rank an integer.
    std::vector<std::size_t> order(res.n);
    for (std::size_t i = 0; i < res.n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    std::vector<long> rank2(res.n);
    double tie_term = 0;
    for (std::size_t i = 0; i < res.n;) {
        std::size_t j = i;
        while (j + 1 < res.n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const long mid2 = static_cast<long>(i + 1 + j + 1);  // 2 * (first + last) / 2
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = mid2;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    long w2 = 0;
    for (std::size_t i = 0; i < res.n; ++i)
        if (diffs[i] > 0) w2 += rank2[i];
    res.w_plus = static_cast<double>(w2) / 2.0;

    const double n = static_cast<double>(res.n);
    if (exact) {
        long total2 = 0;
        for (long r : rank2) total2 += r;
        std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
        ways[0] = 1.0;
        long reach = 0;
        for (long r : rank2) {
            for (long s = reach; s >= 0; --s)
                if (ways[s] != 0.0) ways[s + r] += ways[s];
            reach += r;
        }
        const double all = std::ldexp(1.0, static_cast<int>(res.n));
        double lower = 0, upper = 0;
        for (long s = 0; s <= total2; ++s) {
            if (s <= w2) lower += ways[s];
            if (s >= w2) upper += ways[s];
        }
        res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    } else {
        const double mean = n * (n + 1) / 4.0;
        const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, (std::abs(res.w_plus - mean) - 0.5) / std::sqrt(var));
        res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
    res.significant = res.p_value < 1.0 - level;
    return res;
}

EvalReport evaluate(const Qrels& qrels, const std::vector<std::pair<std::string, RunRankings>>& runs,
                    std::size_t depth) {
    EvalReport report;
    std::vector<std::string> judged;
    for (const auto& [qid, rel] : qrels) {
        if (rel.empty()) report.excluded_queries.push_back(qid);
        else judged.push_back(qid);
    }
    std::set<std::string> excluded(report.excluded_queries.begin(), report.excluded_queries.end());
    for (const auto& [name, run] : runs)
        for (const auto& [qid, _] : run)
            if (!qrels.contains(qid) && excluded.insert(qid).second) report.excluded_queries.push_back(qid);
    std::sort(report.excluded_queries.begin(), report.excluded_queries.end());

    for (const auto& [name, run] : runs) {
        SystemEval sys;
        sys.name = name;
        std::size_t total_rel = 0, total_hit = 0;
        for (const auto& qid : judged) {
            const auto& rel = qrels.at(qid);
            QueryEval q;
            q.query_id = qid;
            q.relevant = rel.size();
            if (auto it = run.find(qid); it != run.end()) {
                q.ap = average_precision(it->second, rel, depth);
                q.relevant_retrieved = relevant_retrieved(it->second, rel, depth);
            }
            q.recall = static_cast<double>(q.relevant_retrieved) / static_cast<double>(q.relevant);
            total_rel += q.relevant;
            total_hit += q.relevant_retrieved;
            sys.map += q.ap;
            sys.macro_recall += q.recall;
            sys.queries.push_back(q);
        }
        if (!judged.empty()) {
            sys.map /= static_cast<double>(judged.size());
            sys.macro_recall /= static_cast<double>(judged.size());
            sys.micro_recall = static_cast<double>(total_hit) / static_cast<double>(total_rel);
        }
        report.systems.push_back(std::move(sys));
    }

    if (!report.systems.empty()) {
        const auto& first = report.systems.front();
        auto column = [](const SystemEval& s, bool ap) {
            std::vector<double> v;
            for (const auto& q : s.queries) v.push_back(ap ? q.ap : q.recall);
            return v;
        };
        for (const auto& sys : report.systems) {
            report.ap_vs_first.push_back(wilcoxon_two_sided(column(sys, true), column(first, true)));
            report.recall_vs_first.push_back(wilcoxon_two_sided(column(sys, false), column(first, false)));
        }
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::size_t width = 6;
    for (const auto& s : report.systems) width = std::max(width, s.name.size());
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s\n", static_cast<int>(width), "system", "prec", "recall",
                  "recall-m");
    out << buf;
    for (std::size_t i = 0; i < report.systems.size(); ++i) {
        const auto& s = report.systems[i];
        const char* ap_mark = (i > 0 && report.ap_vs_first[i].significant) ? "*" : " ";
        const char* rc_mark = (i > 0 && report.recall_vs_first[i].significant) ? "*" : " ";
        std::snprintf(buf, sizeof buf, "%-*s  %7.2f%%%s  %7.2f%%%s  %7.2f%%\n", static_cast<int>(width), s.name.c_str(),
                      100.0 * s.map, ap_mark, 100.0 * s.micro_recall, rc_mark, 100.0 * s.macro_recall);
        out << buf;
    }
    const std::size_t nq = report.systems.empty() ? 0 : report.systems.front().queries.size();
    out << "queries: " << nq;
    if (!report.excluded_queries.empty()) out << " (excluded without relevant documents: " << report.excluded_queries.size() << ")";
    out << "\n* two-sided Wilcoxon, p < 0.05 against " << (report.systems.empty() ? "-" : report.systems.front().name)
        << "\n";
    return out.str();
}

}  // namespace pseudoq
