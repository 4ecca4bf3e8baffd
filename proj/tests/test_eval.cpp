#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "kge/eval.hpp"

using namespace kge;

namespace {

// Brute-force reference: materialize the full sorted candidate list and
// read MQ / P@10 off it. Kept independent of the pipeline implementation.
struct BruteResult {
    bool excluded;
    double mq;
    bool hit10;
};

BruteResult brute_force_rank(Id true_object, std::vector<ScoredCandidate> scores,
                             const std::set<Id>& answers) {
    std::sort(scores.begin(), scores.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entity < b.entity;
    });
    double true_score = 0.0;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < scores.size(); i++)
        if (scores[i].entity == true_object) {
            true_score = scores[i].score;
            rank = i + 1;
        }
    std::size_t incorrect = 0, below = 0;
    for (const ScoredCandidate& c : scores) {
        if (answers.count(c.entity)) continue;
        incorrect++;
        if (c.score <= true_score) below++;
    }
    if (incorrect == 0) return {true, 0.0, false};
    return {false, static_cast<double>(below) / static_cast<double>(incorrect), rank <= 10};
}

}  // namespace

TEST_CASE("mean_quantile hand cases") {
    const std::set<Id> answers = {0};
    std::vector<ScoredCandidate> scores = {{0, 1.0}, {1, 0.5}, {2, 0.4}, {3, 0.3}, {4, 0.2}};
    CHECK(*mean_quantile(0, scores, answers) == 1.0);

    scores = {{0, 1.0}, {1, 0.5}, {2, 0.4}, {3, 0.3}, {4, 2.0}};
    CHECK(*mean_quantile(0, scores, answers) == 0.75);

    // T(r_k) == [[q]] -> excluded
    CHECK(!mean_quantile(0, {{0, 1.0}}, answers).has_value());

    // ties count in the model's favor (<=)
    scores = {{0, 1.0}, {1, 1.0}};
    CHECK(*mean_quantile(0, scores, answers) == 1.0);

    CHECK_THROWS(mean_quantile(9, scores, answers));
}

TEST_CASE("p_at_10 rank arithmetic and tie-break") {
    std::vector<ScoredCandidate> small;
    for (Id e = 0; e < 8; e++) small.push_back({e, static_cast<double>(e)});
    for (Id e = 0; e < 8; e++) CHECK(p_at_10(e, small));  // |T| <= 10

    std::vector<ScoredCandidate> big;
    big.push_back({0, 0.0});
    for (Id e = 1; e <= 10; e++) big.push_back({e, 1.0});
    CHECK_FALSE(p_at_10(0, big));  // ten strictly higher -> rank 11

    // tie at the cutoff resolved by ascending entity id
    std::vector<ScoredCandidate> tie;
    for (Id e = 0; e < 9; e++) tie.push_back({e, 2.0});
    tie.push_back({9, 1.0});
    tie.push_back({10, 1.0});
    CHECK(p_at_10(9, tie));        // rank 10
    CHECK_FALSE(p_at_10(10, tie)); // rank 11 after losing the tie-break
}

TEST_CASE("ideal scorer achieves MQ 1.0 and P@10 100") {
    const KnowledgeGraph g = test::family_graph();
    // score by answer membership: build a model whose score we override
    // is unnecessary; feed mean_quantile/p_at_10 directly per query
    const auto queries = sample_paths(g, 2, 3, 20, 77);
    for (const PathQuery& q : queries) {
        const auto answers = answer_set(g, q.subject, q.path);
        std::vector<ScoredCandidate> scores;
        for (const Id e : candidate_set(g, q.path.back()))
            scores.push_back({e, answers.count(e) ? 1.0 : 0.0});
        const auto mq = mean_quantile(q.object, scores, answers);
        if (mq) CHECK(*mq == 1.0);
    }
}

TEST_CASE("evaluate_ranking matches the brute-force reference on random graphs") {
    std::mt19937_64 rng(301);
    std::uniform_int_distribution<int> n_ent(6, 40), pick(0, 1000);
    for (int trial = 0; trial < 25; trial++) {
        const int ents = n_ent(rng);
        std::vector<Triple> triples;
        const int n_rel = 2 + trial % 3;
        for (int i = 0; i < ents * 2; i++)
            triples.push_back({"e" + std::to_string(pick(rng) % ents),
                               "r" + std::to_string(pick(rng) % n_rel),
                               "e" + std::to_string(pick(rng) % ents)});
        const KnowledgeGraph g = build_graph(triples);
        std::vector<PathQuery> queries;
        for (const PathQuery& q : sample_paths(g, 2, 3, 10, rng())) queries.push_back(q);

        const ModelParams p =
            init_params(ModelKind::Complex, {.n = 6}, g.entities.size(), g.relations.size(), 0.3,
                        rng());
        const RankingReport report = evaluate_ranking(p, queries, g);

        for (std::size_t i = 0; i < queries.size(); i++) {
            const PathQuery& q = queries[i];
            const auto answers = answer_set(g, q.subject, q.path);
            std::vector<ScoredCandidate> scores;
            for (const Id e : candidate_set(g, q.path.back()))
                scores.push_back({e, score_path(p, q.subject, q.path, e)});
            const BruteResult expected = brute_force_rank(q.object, scores, answers);
            CHECK(report.per_query[i].excluded == expected.excluded);
            if (!expected.excluded) {
                CHECK(report.per_query[i].mq == expected.mq);
                CHECK(report.per_query[i].hit10 == expected.hit10);
            }
        }
        CHECK(report.included + report.excluded == queries.size());
        CHECK(report.mq >= 0.0);
        CHECK(report.mq <= 1.0);
    }
}

TEST_CASE("parallel evaluation equals the serial run") {
    const KnowledgeGraph g = test::family_graph();
    const auto queries = sample_paths(g, 2, 3, 40, 5);
    const ModelParams p =
        init_params(ModelKind::BlockHole, {.b = 2, .m = 4}, g.entities.size(), g.relations.size(),
                    0.3, 99);
    const RankingReport serial = evaluate_ranking(p, queries, g, 1);
    const RankingReport parallel = evaluate_ranking(p, queries, g, 4);
    CHECK(serial.mq == parallel.mq);
    CHECK(serial.p_at_10 == parallel.p_at_10);
    for (std::size_t i = 0; i < queries.size(); i++) {
        CHECK(serial.per_query[i].mq == parallel.per_query[i].mq);
        CHECK(serial.per_query[i].hit10 == parallel.per_query[i].hit10);
    }
}

TEST_CASE("make_reverse_negatives") {
    const KnowledgeGraph g = test::family_graph();
    const Id william = *g.entities.lookup("william");
    const Id beatrice = *g.entities.lookup("beatrice");

    // palindromic path reverses to itself and still holds, so it is dropped
    const KnowledgeGraph chain = build_graph({{"a", "r", "b"}, {"b", "r", "c"}});
    PathQuery palindrome{*chain.entities.lookup("a"), test::lookup_path(chain, {"r", "r"}),
                         *chain.entities.lookup("c"), true};
    CHECK(path_holds(chain, palindrome));
    CHECK(make_reverse_negatives({palindrome}, chain).empty());

    PathQuery uncle{william, test::lookup_path(g, {"fatherOf_inv", "brotherOf", "fatherOf"}),
                    beatrice, true};
    const auto negs = make_reverse_negatives({uncle}, g);
    REQUIRE(negs.size() == 1);
    CHECK(negs[0].path == test::lookup_path(g, {"fatherOf", "brotherOf", "fatherOf_inv"}));
    CHECK(*negs[0].label == false);
    CHECK_FALSE(path_holds(g, negs[0]));
}

TEST_CASE("classification protocol") {
    const KnowledgeGraph g = test::family_graph();
    // constant +1 scorer: DistMult with all-ones vectors
    ModelParams p = init_params(ModelKind::DistMult, {.n = 1}, g.entities.size(),
                                g.relations.size(), 0.0, 1);
    for (double& x : p.ent) x = 1.0;
    for (double& x : p.rel) x = 1.0;

    std::vector<PathQuery> all_true;
    for (PathQuery q : sample_paths(g, 2, 3, 10, 3)) {
        q.label = true;
        all_true.push_back(q);
    }
    const ClassReport r = evaluate_classification(p, all_true);
    CHECK(r.accuracy == 100.0);
    CHECK(r.tp == all_true.size());

    // phi == 0 exactly classifies true (>= threshold)
    ModelParams zero = init_params(ModelKind::DistMult, {.n = 1}, g.entities.size(),
                                   g.relations.size(), 0.0, 1);
    const ClassReport rz = evaluate_classification(zero, all_true);
    CHECK(rz.accuracy == 100.0);

    std::vector<PathQuery> unlabeled = all_true;
    unlabeled[0].label = std::nullopt;
    CHECK_THROWS(evaluate_classification(zero, unlabeled));

    CHECK(r.tp + r.fp + r.tn + r.fn == all_true.size());
}

TEST_CASE("ComplEx scores a positive and its reversal identically") {
    const KnowledgeGraph g = test::family_graph();
    const ModelParams p = init_params(ModelKind::Complex, {.n = 8}, g.entities.size(),
                                      g.relations.size(), 0.4, 55);
    for (const PathQuery& q : sample_paths(g, 2, 4, 20, 9)) {
        PathQuery rev = q;
        std::reverse(rev.path.begin(), rev.path.end());
        CHECK(score_query(p, q) == doctest::Approx(score_query(p, rev)).epsilon(1e-12));
    }
}
