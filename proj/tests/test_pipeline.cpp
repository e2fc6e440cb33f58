#include <doctest.h>

#include <cmath>

#include "fixture.hpp"
#include "pseudoq/baselines.hpp"
#include "pseudoq/diag.hpp"
#include "pseudoq/error.hpp"
#include "pseudoq/oracles.hpp"
#include "pseudoq/pipeline.hpp"

using namespace pseudoq;
using namespace pseudoq::testing;

namespace {

RunConfig degenerate(Method method, std::size_t docs, double mu) {
    RunConfig c;
    c.method = method;
    c.rounds = 1;
    c.alpha1 = docs;
    c.alpha = 1;
    c.m = docs + 1;
    c.delta = 1;
    c.beta = 1;
    c.mu = mu;
    c.drift.kind = DriftKind::none;
    c.depth = docs;
    return c;
}

RetrievalContext context_of(const World& w) { return {w.corpus, w.lookup, w.clusters ? &*w.clusters : nullptr}; }

RunConfig random_config(std::mt19937_64& rng, std::size_t docs, double mu) {
    RunConfig c;
    c.method = std::vector<Method>{Method::vdoc, Method::mcdoc, Method::mccluster}[rng() % 3];
    c.alpha1 = 1 + rng() % docs;
    c.alpha = 1 + rng() % 4;
    c.m = rng() % 3 ? c.alpha + 1 + rng() % 4 : 0;
    c.alpha_cluster = 1 + rng() % 3;
    c.beta = 1 + rng() % 4;
    c.delta = 1 + rng() % std::min<std::size_t>(docs, 4);
    c.rounds = 1 + rng() % 3;
    c.mu = mu;
    c.drift.kind = static_cast<DriftKind>(rng() % 6);
    c.drift.lambda = 0.1 * static_cast<double>(rng() % 11);
    c.drift.cutoff = rng() % 3 ? 1 + rng() % docs : 0;
    c.depth = 1 + rng() % docs;
    return c;
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("one-round configurations reduce to the query-likelihood baseline") {
        std::mt19937_64 rng(401);
        for (int trial = 0; trial < 20; ++trial) {
            auto w = random_world(rng, 10 + rng() % 41, 12);
            const auto n = w->corpus.size();
            const auto baseline = lm_baseline(w->query, w->renderers, n).ids();

            CHECK(run_retrieval(w->query, degenerate(Method::mcdoc, n, w->mu), context_of(*w)).ranking.ids() == baseline);
            CHECK(run_retrieval(w->query, degenerate(Method::vdoc, n, w->mu), context_of(*w)).ranking.ids() == baseline);

            std::vector<std::vector<DocId>> singles;
            for (DocId d = 0; d < n; ++d) singles.push_back({d});
            w->cluster_by_members(singles, 1);
            CHECK(run_retrieval(w->query, degenerate(Method::mccluster, n, w->mu), context_of(*w)).ranking.ids() == baseline);
        }
    }

    TEST_CASE("two-round mcdoc with interpolation matches the replay") {
        auto c = corpus_of({"lava ash crater", "lava flow", "ash cloud plume", "coffee bean roast", "bean crop",
                            "crater rim lava", "harbor ship", "ship crane dock", "roast coffee aroma", "plume ash lava"});
        World w(std::move(c), 10.0, Query{});
        w.query = make_query(w.corpus, "q", "lava ash");
        RunConfig cfg;
        cfg.method = Method::mcdoc;
        cfg.rounds = 2;
        cfg.alpha1 = 4;
        cfg.alpha = 3;
        cfg.m = 5;
        cfg.mu = 10.0;
        cfg.drift = {DriftKind::interpolation, 0.4, 0};
        cfg.depth = 10;
        const auto got = run_retrieval(w.query, cfg, context_of(w));
        CHECK(rankings_match(got.ranking, oracle::retrieval(w.query, cfg, w.corpus, {})));
        REQUIRE(got.rounds.size() == 2);
        CHECK(got.rounds[0].pseudo_queries == 1);
        CHECK(got.rounds[0].spread == 4);
        CHECK(got.rounds[1].pseudo_queries == 4);
        CHECK(got.rounds[1].spread == 3);
    }

    TEST_CASE("random configurations match the replay") {
        std::mt19937_64 rng(403);
        for (int trial = 0; trial < 80; ++trial) {
            auto w = random_world(rng, 3 + rng() % 10, 2 + rng() % 7, rng() % 2 ? 5 : 0);
            auto cfg = random_config(rng, w->corpus.size(), w->mu);
            w->cluster_by_neighbors(cfg.delta);
            if (cfg.effective_m() <= cfg.alpha) cfg.m = cfg.alpha + 1;
            ScoredRanking got;
            try {
                got = run_retrieval(w->query, cfg, context_of(*w)).ranking;
            } catch (const DataError&) {
                // A round without positive scores is reported, not replayed.
                CHECK_THROWS_AS(oracle::retrieval(w->query, cfg, w->corpus, w->members()), DataError);
                continue;
            }
            CHECK_MESSAGE(rankings_match(got, oracle::retrieval(w->query, cfg, w->corpus, w->members())),
                          "trial " << trial << " method " << to_string(cfg.method) << " drift " << to_string(cfg.drift.kind));
            CHECK(got.size() <= cfg.depth);
        }
    }

    TEST_CASE("pseudo-queries are max-normalized positive scores") {
        const auto pq = pseudo_queries_from(ScoredRanking::from_scores(std::vector<double>{0.2, 0.0, 0.8, 0.4}));
        REQUIRE(pq.size() == 3);
        CHECK(pq.items()[0].id == 2);
        CHECK(pq.items()[0].weight == 1.0);
        CHECK(pq.items()[2].weight == 0.25);
        CHECK(pseudo_queries_from(ScoredRanking::from_scores(std::vector<double>{0, 0})).empty());
    }

    TEST_CASE("an ulp-larger score behind its tie group still yields weights in [0,1]") {
        const double x = 0.94379837983798387;
        const auto ranking = ScoredRanking::from_scores(std::vector<double>{x, std::nextafter(x, 2.0)});
        REQUIRE(ranking.entries[0].id == 0);
        CHECK(ranking.max_score() == std::nextafter(x, 2.0));
        const auto pq = pseudo_queries_from(ranking);
        REQUIRE(pq.size() == 2);
        CHECK(pq.items()[0].weight < 1.0);
        CHECK(pq.items()[1].weight == 1.0);
    }

    TEST_CASE("configuration and context errors") {
        World w(corpus_of({"a b", "b c", "c d"}), 2000, Query{});
        w.query = make_query(w.corpus, "q", "b");
        RunConfig cfg;
        cfg.alpha = 3;
        cfg.m = 3;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.m = 0;
        CHECK_NOTHROW(cfg.validate());
        cfg.rounds = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.rounds = 11;
        std::vector<std::string> seen;
        {
            ScopedDiagnosticSink sink([&](const std::string& m) { seen.push_back(m); });
            cfg.validate();
        }
        CHECK(seen.size() == 1);
        cfg.rounds = 2;
        cfg.drift = {DriftKind::interpolation, -0.1, 0};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        CHECK_THROWS_AS(parse_method("rm3"), ConfigError);

        RunConfig ok;
        ok.alpha1 = 2;
        ok.depth = 3;
        CHECK_THROWS_AS(run_retrieval(make_query(w.corpus, "e", "zzz"), ok, context_of(w)), DataError);
        ok.mu = 100;
        CHECK_THROWS_AS(run_retrieval(w.query, ok, context_of(w)), ArtifactMismatch);
        ok.mu = 2000;
        ok.method = Method::mccluster;
        CHECK_THROWS_AS(run_retrieval(w.query, ok, context_of(w)), DataError);
        w.cluster_by_neighbors(2);
        ok.delta = 3;
        CHECK_THROWS_AS(run_retrieval(w.query, ok, context_of(w)), ArtifactMismatch);
        ok.delta = 2;
        CHECK(run_retrieval(w.query, ok, context_of(w)).ranking.size() <= 3);
    }
}
