#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pseudoq {

/// query id -> relevant docnos (rel > 0).
using Qrels = std::map<std::string, std::set<std::string>>;

/// query id -> docnos in rank order.
using RunRankings = std::map<std::string, std::vector<std::string>>;

/// Parses `qid iter docno rel` lines.
Qrels parse_qrels(std::string_view data);

/// Parses TREC 6-column run lines `qid Q0 docno rank score tag`. Entries are
/// ordered by score descending (rank, then file order, break ties); a docno
/// appearing twice for one query is a ParseError.
RunRankings parse_run(std::string_view data);

/// Non-interpolated average precision over the first `depth` entries.
double average_precision(std::span<const std::string> run, const std::set<std::string>& relevant, std::size_t depth);

/// |relevant within the first depth entries| / |relevant|.
double recall_at(std::span<const std::string> run, const std::set<std::string>& relevant, std::size_t depth);
std::size_t relevant_retrieved(std::span<const std::string> run, const std::set<std::string>& relevant,
                               std::size_t depth);

struct WilcoxonResult {
    bool sufficient = false;  // at least 5 nonzero differences
    bool significant = false;
    double p_value = 1.0;
    std::size_t n = 0;        // nonzero pairs
    double w_plus = 0;        // sum of positive ranks
    bool exact = false;
};

/// Two-sided Wilcoxon signed-rank test on paired values. Zero differences
/// are dropped and ties get mid-ranks; n <= 25 uses the exact null
/// distribution, larger n the normal approximation with continuity
/// correction. Significant iff p < 1 - level.
WilcoxonResult wilcoxon_two_sided(std::span<const double> a, std::span<const double> b, double level = 0.95);

/// Same test, forcing the exact (true) or approximate (false) branch.
WilcoxonResult wilcoxon_two_sided(std::span<const double> a, std::span<const double> b, double level, bool exact);

struct QueryEval {
    std::string query_id;
    double ap = 0;
    double recall = 0;
    std::size_t relevant = 0;
    std::size_t relevant_retrieved = 0;
};

struct SystemEval {
    std::string name;
    std::vector<QueryEval> queries;  // ascending query id
    double map = 0;
    double micro_recall = 0;  // total relevant retrieved / total relevant
    double macro_recall = 0;
};

struct EvalReport {
    std::vector<SystemEval> systems;
    std::vector<std::string> excluded_queries;  // no relevant documents judged
    // Significance of each system against the first one, for AP and recall.
    std::vector<WilcoxonResult> ap_vs_first;
    std::vector<WilcoxonResult> recall_vs_first;
};

/// Evaluates every run over the queries that have judged relevant documents.
/// Queries a run does not answer score 0.
EvalReport evaluate(const Qrels& qrels, const std::vector<std::pair<std::string, RunRankings>>& runs,
                    std::size_t depth);

/// Aligned table: one row per system with MAP and recall in percent;
/// '*' marks a significant difference from the first system.
std::string format_report(const EvalReport& report);

}  // namespace pseudoq
