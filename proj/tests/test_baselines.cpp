#include <doctest.h>

#include <cmath>

#include "fixture.hpp"
#include "pseudoq/baselines.hpp"
#include "pseudoq/error.hpp"
#include "pseudoq/oracles.hpp"

using namespace pseudoq;
using namespace pseudoq::testing;

TEST_SUITE("baselines") {
    TEST_CASE("lm baseline ranks by the query rendition") {
        std::mt19937_64 rng(501);
        for (int trial = 0; trial < 30; ++trial) {
            auto w = random_world(rng, 3 + rng() % 10, 2 + rng() % 7);
            const std::size_t n = 1 + rng() % w->corpus.size();
            CHECK(rankings_match(lm_baseline(w->query, w->renderers, n), oracle::lm_baseline(w->corpus, w->query, w->mu, n)));
        }
        auto w = random_world(rng, 4, 4);
        CHECK_THROWS_AS(lm_baseline(Query{}, w->renderers, 3), DataError);
    }

    TEST_CASE("log tf.idf") {
        CHECK(log_tfidf(1, 1, 2) == doctest::Approx(std::log(2.0)));
        CHECK(log_tfidf(3, 2, 8) == doctest::Approx((1 + std::log(3.0)) * std::log(4.0)));
        CHECK(log_tfidf(0, 2, 8) == 0.0);
        CHECK(log_tfidf(5, 8, 8) == 0.0);
        const TermVector a{{0, 1.0}, {2, 2.0}, {5, 3.0}}, b{{2, 4.0}, {3, 1.0}, {5, 0.5}};
        CHECK(inner_product(a, b) == 9.5);
    }

    TEST_CASE("rocchio with zero expansion weight is plain tf.idf retrieval") {
        auto c = corpus_of({"a b", "a a c", "b c d", "d d", "a d e"});
        const auto q = make_query(c, "q", "a d");
        RocchioParams p;
        p.gamma = 0;
        const auto qv = tfidf_vector(q.counts, c);
        CHECK(rocchio_expanded_query(q, c, p) == qv);
        std::vector<double> want;
        for (const auto& d : c.documents()) want.push_back(inner_product(qv, tfidf_vector(d.counts, c)));
        CHECK(rocchio_rank(q, c, p, 5).ids() == ScoredRanking::from_scores(want).ids());
    }

    TEST_CASE("rocchio adds the heaviest feedback term") {
        // The top document for "a" is D1; its heaviest non-query term is c.
        auto c = corpus_of({"a b", "a a c c c", "b d", "d e", "b e"});
        const auto q = make_query(c, "q", "a");
        RocchioParams p;
        p.feedback_docs = 1;
        p.terms = 1;
        p.gamma = 0.5;
        const auto v = rocchio_expanded_query(q, c, p);
        REQUIRE(v.size() == 2);
        const auto c_id = *c.term_id("c");
        CHECK(v[1].term == c_id);
        CHECK(v[1].weight == doctest::Approx(0.5 * log_tfidf(3, 1, 5)));
        CHECK_THROWS_AS(rocchio_expanded_query(q, c, RocchioParams{0, 1, 0.5}), ConfigError);
    }

    TEST_CASE("rocchio matches the dense oracle") {
        std::mt19937_64 rng(503);
        for (int trial = 0; trial < 40; ++trial) {
            auto w = random_world(rng, 3 + rng() % 10, 2 + rng() % 7);
            RocchioParams p{1 + rng() % 4, rng() % 4, 0.25 * static_cast<double>(rng() % 5)};
            const std::size_t n = 1 + rng() % w->corpus.size();
            CHECK(rankings_match(rocchio_rank(w->query, w->corpus, p, n), oracle::rocchio(w->corpus, w->query, p, n)));
        }
    }

    TEST_CASE("relevance model from one document is its smoothed model") {
        auto c = corpus_of({"a a b", "c d", "b c"});
        DocumentRenderers r(c, 2000);
        const auto q = make_query(c, "q", "a");
        RelevanceModelParams p{1, 0.3, 0};
        const auto model = estimate_relevance_model(q, r, p);
        CHECK(model.total() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(model.support() == c.vocabulary_size());
        const auto& d0 = c.document(0);
        for (const auto& tw : model.probs) {
            const double want = 0.7 * d0.counts.count(tw.term) / 3.0 + 0.3 * c.collection_prob(tw.term);
            CHECK(tw.weight == doctest::Approx(want).epsilon(1e-12));
        }
    }

    TEST_CASE("clipping keeps the heaviest terms and renormalizes") {
        const RelevanceDistribution m{{{0, 0.1}, {1, 0.4}, {2, 0.2}, {3, 0.2}, {4, 0.1}}};
        const auto c = clip_relevance_model(m, 3);
        REQUIRE(c.support() == 3);
        CHECK(c.probs[0].term == 1);
        CHECK(c.probs[1].term == 2);
        CHECK(c.probs[2].term == 3);
        CHECK(c.total() == doctest::Approx(1.0));
        CHECK(c.probs[0].weight == doctest::Approx(0.5));
        CHECK(clip_relevance_model(m, 5).probs == m.probs);
        CHECK(clip_relevance_model(m, 0).probs == m.probs);
    }

    TEST_CASE("relevance model sums to one and matches the oracle") {
        std::mt19937_64 rng(505);
        for (int trial = 0; trial < 40; ++trial) {
            auto w = random_world(rng, 3 + rng() % 10, 2 + rng() % 7);
            RelevanceModelParams p{1 + rng() % 5, 0.1 + 0.2 * static_cast<double>(rng() % 5), rng() % 2 ? 0 : 1 + rng() % 6};
            CHECK(estimate_relevance_model(w->query, w->renderers, p).total() == doctest::Approx(1.0).epsilon(1e-12));
            const std::size_t n = 1 + rng() % w->corpus.size();
            CHECK_MESSAGE(rankings_match(relevance_model_rank(w->query, w->renderers, p, n),
                                         oracle::relevance_model(w->corpus, w->query, w->mu, p, n)),
                          "trial " << trial);
        }
        auto w = random_world(rng, 4, 4);
        CHECK_THROWS_AS(estimate_relevance_model(w->query, w->renderers, {1, 1.0, 0}), ConfigError);
    }

    TEST_CASE("direct and sparse KL scoring agree") {
        std::mt19937_64 rng(507);
        for (int trial = 0; trial < 40; ++trial) {
            auto w = random_world(rng, 5 + rng() % 30, 4 + rng() % 20);
            RelevanceModelParams p{1 + rng() % 5, 0.5, rng() % 2 ? 0 : 1 + rng() % 8};
            const auto model = clip_relevance_model(estimate_relevance_model(w->query, w->renderers, p), p.clip);
            const auto direct = relevance_model_scores(model, w->renderers, true);
            const auto sparse = relevance_model_scores(model, w->renderers, false);
            for (std::size_t d = 0; d < direct.size(); ++d) {
                CHECK(direct[d] <= 1e-15);
                CHECK(std::abs(direct[d] - sparse[d]) <= 1e-12 * std::max(1.0, std::abs(direct[d])));
            }
        }
    }

    TEST_CASE("one-document relevance model usually ranks its source first") {
        // Not a theorem: KL to a mixture need not be minimized by its source,
        // so the rate is reported rather than asserted.
        std::mt19937_64 rng(509);
        int eligible = 0, first = 0;
        for (int trial = 0; trial < 200; ++trial) {
            auto w = random_world(rng, 8 + rng() % 20, 6 + rng() % 10);
            const auto top = w->renderers.top(w->query.counts, 2);
            if (top.size() < 2 || !(top[0].score > top[1].score)) continue;
            ++eligible;
            const RelevanceModelParams p{1, 0.1 + 0.1 * static_cast<double>(rng() % 5), 0};
            first += relevance_model_rank(w->query, w->renderers, p, 1).entries[0].id == top[0].id;
        }
        MESSAGE("source ranked first in " << first << " of " << eligible << " eligible corpora");
        CHECK(eligible > 0);
    }
}
