#include "pseudoq/drift.hpp"

#include <algorithm>
#include <string>

#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"

namespace pseudoq {

std::string_view to_string(DriftKind kind) {
    switch (kind) {
        case DriftKind::none: return "none";
        case DriftKind::interpolation: return "interpolation";
        case DriftKind::truncated_rerank: return "truncated_rerank";
        case DriftKind::iterated_truncation: return "iterated_truncation";
        case DriftKind::iterated_rerank: return "iterated_rerank";
        case DriftKind::iterated_interpolation: return "iterated_interpolation";
    }
    return "none";
}

DriftKind parse_drift_kind(std::string_view name) {
    for (auto k : {DriftKind::none, DriftKind::interpolation, DriftKind::truncated_rerank,
                   DriftKind::iterated_truncation, DriftKind::iterated_rerank, DriftKind::iterated_interpolation})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown drift technique '" + std::string(name) + "'");
}

void DriftTechnique::validate() const {
    if (interpolates() && !(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0,1]");
    if (truncates() && cutoff < 1) throw ConfigError("drift cutoff must be >= 1");
}

ScoredRanking interpolate(const ScoredRanking& method, std::span<const double> query_scores, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0,1]");
    double query_max = 0;
    for (const auto& e : method.entries) {
        if (e.id >= query_scores.size()) throw DataError("interpolate: query scores do not cover the ranking");
        query_max = std::max(query_max, query_scores[e.id]);
    }
    if (!(query_max > 0)) throw DataError("interpolate: query scores have no positive maximum");
    const double method_max = method.max_score();

    std::vector<ScoredId> out;
    out.reserve(method.size());
    if (!(method_max > 0)) {
        diagnostic("interpolate: method scores are all zero; falling back to query rendition");
        for (const auto& e : method.entries) out.push_back({e.id, query_scores[e.id] / query_max});
        return ScoredRanking::from_entries(std::move(out));
    }
    for (const auto& e : method.entries)
        out.push_back({e.id, lambda * (e.score / method_max) + (1.0 - lambda) * (query_scores[e.id] / query_max)});
    return ScoredRanking::from_entries(std::move(out));
}

ScoredRanking truncated_rerank(const ScoredRanking& method, std::span<const double> query_scores, std::size_t n) {
    std::vector<ScoredId> out;
    const std::size_t keep = std::min(n, method.size());
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        if (!(method.entries[i].score > 0.0)) break;  // zero-score documents were not retrieved
        const auto id = method.entries[i].id;
        if (id >= query_scores.size()) throw DataError("truncated_rerank: query scores do not cover the ranking");
        out.push_back({id, query_scores[id]});
    }
    return ScoredRanking::from_entries(std::move(out));
}

ScoredRanking iterated_truncation(const ScoredRanking& scores, std::size_t n) {
    auto entries = scores.entries;
    for (std::size_t i = n; i < entries.size(); ++i) entries[i].score = 0.0;
    return ScoredRanking::from_entries(std::move(entries));
}

ScoredRanking apply_round_drift(const DriftTechnique& t, const ScoredRanking& scores, std::span<const double> query_scores) {
    switch (t.kind) {
        case DriftKind::iterated_truncation: return iterated_truncation(scores, t.cutoff);
        case DriftKind::iterated_rerank: return truncated_rerank(scores, query_scores, t.cutoff);
        case DriftKind::iterated_interpolation: return interpolate(scores, query_scores, t.lambda);
        default: return scores;
    }
}

ScoredRanking apply_final_drift(const DriftTechnique& t, const ScoredRanking& scores, std::span<const double> query_scores) {
    switch (t.kind) {
        case DriftKind::interpolation: return interpolate(scores, query_scores, t.lambda);
        case DriftKind::truncated_rerank: return truncated_rerank(scores, query_scores, t.cutoff);
        default: return scores;
    }
}

}  // namespace pseudoq
