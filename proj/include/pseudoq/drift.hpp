#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "pseudoq/scoring.hpp"

namespace pseudoq {

enum class DriftKind {
    none,
    interpolation,
    truncated_rerank,
    iterated_truncation,
    iterated_rerank,
    iterated_interpolation,
};

std::string_view to_string(DriftKind kind);
DriftKind parse_drift_kind(std::string_view name);

struct DriftTechnique {
    DriftKind kind = DriftKind::none;
    double lambda = 0.5;  // interpolation kinds
    std::size_t cutoff = 1000;  // truncation and re-rank kinds

    bool interpolates() const {
        return kind == DriftKind::interpolation || kind == DriftKind::iterated_interpolation;
    }
    bool truncates() const {
        return kind == DriftKind::truncated_rerank || kind == DriftKind::iterated_truncation ||
               kind == DriftKind::iterated_rerank;
    }
    bool iterated() const {
        return kind == DriftKind::iterated_truncation || kind == DriftKind::iterated_rerank ||
               kind == DriftKind::iterated_interpolation;
    }
    void validate() const;
};

/// lambda * s(d)/max s + (1 - lambda) * p(q|d)/max p(q|.). `query_scores`
/// holds p(q|d) indexed by doc id and must cover every ranked document.
/// All-zero method scores fall back to the query ranking with a diagnostic.
ScoredRanking interpolate(const ScoredRanking& method, std::span<const double> query_scores, double lambda);

/// Keeps the method's top-n documents and re-scores them by p(q|d).
/// Documents with a zero method score are not retained.
ScoredRanking truncated_rerank(const ScoredRanking& method, std::span<const double> query_scores, std::size_t n);

/// Zeroes every score below rank n and re-ranks; zeroed documents fall back
/// to doc-id order.
ScoredRanking iterated_truncation(const ScoredRanking& scores, std::size_t n);

/// Per-round transform for iterated kinds; identity otherwise.
ScoredRanking apply_round_drift(const DriftTechnique& t, const ScoredRanking& scores, std::span<const double> query_scores);
/// Final-round transform for interpolation / truncated_rerank; identity otherwise.
ScoredRanking apply_final_drift(const DriftTechnique& t, const ScoredRanking& scores, std::span<const double> query_scores);

}  // namespace pseudoq
