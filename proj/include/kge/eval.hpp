#pragma once

#include <optional>
#include <set>
#include <vector>

#include "kge/graph.hpp"
#include "kge/models.hpp"

namespace kge {

struct ScoredCandidate {
    Id entity;
    double score;
};

struct RankingReport {
    struct PerQuery {
        bool excluded = false;
        double mq = 0.0;
        bool hit10 = false;
    };
    std::vector<PerQuery> per_query;
    double mq = 0.0;        // mean over included queries, in [0,1]
    double p_at_10 = 0.0;   // percentage over included queries
    std::size_t included = 0;
    std::size_t excluded = 0;
};

struct ClassReport {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;  // percentage
};

// Fraction of incorrect candidates N(q) = T(r_k) \ [[q]] scored <= the
// true object. nullopt when N(q) is empty (query excluded). Ties count
// for the model, per the <= in the quantile definition.
std::optional<double> mean_quantile(Id true_object, const std::vector<ScoredCandidate>& scores,
                                    const std::set<Id>& answers);

// True object ranked in the top 10 of all scored candidates; descending
// score, ties broken by ascending entity id.
bool p_at_10(Id true_object, const std::vector<ScoredCandidate>& scores);

// Scores every candidate in T(r_k) (taken from the ground-truth graph)
// with score_path. threads > 1 parallelizes over queries; results are
// identical to the serial run (per-query work is independent).
RankingReport evaluate_ranking(const ModelParams& params, const std::vector<PathQuery>& queries,
                               const KnowledgeGraph& truth, int threads = 1);

// Reversed-path negatives: emits q' = (s, r_k/.../r_1, o) labeled false
// when q' does not hold in the ground-truth graph; holding reversals are
// dropped.
std::vector<PathQuery> make_reverse_negatives(const std::vector<PathQuery>& positives,
                                              const KnowledgeGraph& truth);

// phi(q) >= threshold classifies true.
ClassReport evaluate_classification(const ModelParams& params,
                                    const std::vector<PathQuery>& labeled,
                                    double threshold = 0.0, int threads = 1);

}  // namespace kge
