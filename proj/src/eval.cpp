#include "kge/eval.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kge {

std::optional<double> mean_quantile(Id true_object, const std::vector<ScoredCandidate>& scores,
                                    const std::set<Id>& answers) {
    double true_score = 0.0;
    bool found = false;
    for (const ScoredCandidate& c : scores)
        if (c.entity == true_object) {
            true_score = c.score;
            found = true;
            break;
        }
    if (!found) throw std::runtime_error("mean_quantile: true object missing from score table");

    std::size_t below = 0, incorrect = 0;
    for (const ScoredCandidate& c : scores) {
        if (answers.count(c.entity)) continue;
        incorrect++;
        if (c.score <= true_score) below++;
    }
    if (incorrect == 0) return std::nullopt;
    return static_cast<double>(below) / static_cast<double>(incorrect);
}

bool p_at_10(Id true_object, const std::vector<ScoredCandidate>& scores) {
    double true_score = 0.0;
    bool found = false;
    for (const ScoredCandidate& c : scores)
        if (c.entity == true_object) {
            true_score = c.score;
            found = true;
            break;
        }
    if (!found) throw std::runtime_error("p_at_10: true object missing from score table");

    std::size_t rank = 1;
    for (const ScoredCandidate& c : scores) {
        if (c.entity == true_object) continue;
        if (c.score > true_score || (c.score == true_score && c.entity < true_object)) rank++;
    }
    return rank <= 10;
}

RankingReport evaluate_ranking(const ModelParams& params, const std::vector<PathQuery>& queries,
                               const KnowledgeGraph& truth, int threads) {
    RankingReport report;
    report.per_query.resize(queries.size());

    // answer sets and validity checks are done serially so errors can
    // propagate; candidate scoring is the parallel part
    std::vector<std::set<Id>> all_answers(queries.size());
    for (std::size_t qi = 0; qi < queries.size(); qi++) {
        const PathQuery& q = queries[qi];
        all_answers[qi] = answer_set(truth, q.subject, q.path);
        if (all_answers[qi].count(q.object) == 0)
            throw std::runtime_error("evaluate_ranking: test query does not hold in F*");
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
#endif
    for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(queries.size()); qi++) {
        const PathQuery& q = queries[static_cast<std::size_t>(qi)];
        const std::set<Id>& candidates = candidate_set(truth, q.path.back());
        const std::set<Id>& answers = all_answers[static_cast<std::size_t>(qi)];

        std::vector<ScoredCandidate> scores;
        scores.reserve(candidates.size());
        for (const Id e : candidates)
            scores.push_back({e, score_path(params, q.subject, q.path, e)});

        RankingReport::PerQuery& pq = report.per_query[static_cast<std::size_t>(qi)];
        const std::optional<double> mq = mean_quantile(q.object, scores, answers);
        if (!mq) {
            pq.excluded = true;
        } else {
            pq.mq = *mq;
            pq.hit10 = p_at_10(q.object, scores);
        }
    }

    double mq_sum = 0.0;
    std::size_t hits = 0;
    for (const auto& pq : report.per_query) {
        if (pq.excluded) {
            report.excluded++;
            continue;
        }
        report.included++;
        mq_sum += pq.mq;
        hits += pq.hit10 ? 1 : 0;
    }
    if (report.included > 0) {
        report.mq = mq_sum / static_cast<double>(report.included);
        report.p_at_10 = 100.0 * static_cast<double>(hits) / static_cast<double>(report.included);
    }
    return report;
}

std::vector<PathQuery> make_reverse_negatives(const std::vector<PathQuery>& positives,
                                              const KnowledgeGraph& truth) {
    std::vector<PathQuery> out;
    for (const PathQuery& q : positives) {
        if (q.path.size() < 2) continue;
        PathQuery rev = q;
        std::reverse(rev.path.begin(), rev.path.end());
        rev.label = false;
        if (!path_holds(truth, rev)) out.push_back(std::move(rev));
    }
    return out;
}

ClassReport evaluate_classification(const ModelParams& params,
                                    const std::vector<PathQuery>& labeled, double threshold,
                                    int threads) {
    for (const PathQuery& q : labeled)
        if (!q.label) throw std::runtime_error("evaluate_classification: unlabeled query");

    std::vector<bool> predicted(labeled.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
#endif
    for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(labeled.size()); qi++)
        predicted[static_cast<std::size_t>(qi)] =
            score_query(params, labeled[static_cast<std::size_t>(qi)]) >= threshold;

    ClassReport report;
    for (std::size_t i = 0; i < labeled.size(); i++) {
        const bool truth_label = *labeled[i].label;
        if (predicted[i] && truth_label) report.tp++;
        if (predicted[i] && !truth_label) report.fp++;
        if (!predicted[i] && !truth_label) report.tn++;
        if (!predicted[i] && truth_label) report.fn++;
    }
    if (!labeled.empty())
        report.accuracy =
            100.0 * static_cast<double>(report.tp + report.tn) / static_cast<double>(labeled.size());
    return report;
}

}  // namespace kge
