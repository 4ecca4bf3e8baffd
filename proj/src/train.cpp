#include "kge/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <iostream>
#include <stdexcept>

#include "kge/eval.hpp"

namespace kge {

double logistic_loss(double score, int y) {
    if (y != 1 && y != -1) throw std::invalid_argument("logistic_loss: y must be +1 or -1");
    const double z = -static_cast<double>(y) * score;
    // softplus(z) = log(1 + exp(z))
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

std::vector<PathQuery> sample_negatives(const PathQuery& q, const KnowledgeGraph& g, int k,
                                        std::mt19937_64& rng) {
    if (k < 0) throw std::invalid_argument("sample_negatives: k must be >= 0");
    if (k == 0) return {};
    const Id n_entities = static_cast<Id>(g.entities.size());
    if (n_entities < 2) throw std::runtime_error("sample_negatives: need at least 2 entities");
    std::uniform_int_distribution<Id> pick(0, n_entities - 1);
    std::vector<PathQuery> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; i++) {
        PathQuery neg = q;
        do {
            neg.object = pick(rng);
        } while (neg.object == q.object);
        neg.label = false;
        out.push_back(std::move(neg));
    }
    return out;
}

namespace {

constexpr double kAdaGradEps = 1e-8;

struct Optimizer {
    bool adagrad;
    double eta;
    std::vector<double> ent_acc, rel_acc;

    void apply(ModelParams& p, const SparseGrad& grad, double lambda) {
        for (const GradSlot& slot : grad.slots) {
            double* row = slot.is_entity ? p.ent_row(slot.id) : p.rel_row(slot.id);
            double* acc = nullptr;
            if (adagrad) {
                const std::size_t stride = slot.is_entity ? p.ent_stride() : p.rel_stride();
                auto& table = slot.is_entity ? ent_acc : rel_acc;
                acc = table.data() + static_cast<std::size_t>(slot.id) * stride;
            }
            for (std::size_t c = 0; c < slot.g.size(); c++) {
                const double g = slot.g[c] + 2.0 * lambda * row[c];
                if (adagrad) {
                    acc[c] += g * g;
                    row[c] -= eta * g / (std::sqrt(acc[c]) + kAdaGradEps);
                } else {
                    row[c] -= eta * g;
                }
            }
        }
    }
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Single labeled example: returns its loss and applies the update.
double train_example(ModelParams& p, const PathQuery& q, int y, double lambda, Optimizer& opt) {
    const double score = score_path(p, q.subject, q.path, q.object);
    const double loss = logistic_loss(score, y);
    if (!std::isfinite(loss)) return loss;

    // d loss / d score = -y * sigma(-y * score)
    const double coeff = -static_cast<double>(y) * sigmoid(-static_cast<double>(y) * score);
    SparseGrad grad = grad_path(p, q.subject, q.path, q.object);
    for (GradSlot& slot : grad.slots)
        for (double& g : slot.g) g *= coeff;
    opt.apply(p, grad, lambda);
    return loss;
}

std::string describe_query(const KnowledgeGraph& g, const PathQuery& q) {
    std::string s = g.entities.name(q.subject) + " -[";
    for (std::size_t i = 0; i < q.path.size(); i++) {
        if (i) s += "/";
        s += g.relations.name(q.path[i]);
    }
    return s + "]-> " + g.entities.name(q.object);
}

}  // namespace

TrainReport fit(ModelParams& params, const std::vector<PathQuery>& train,
                const KnowledgeGraph& g, const TrainConfig& config) {
    if (config.eta < 0) throw std::invalid_argument("fit: eta must be >= 0");
    if (config.lambda < 0) throw std::invalid_argument("fit: lambda must be >= 0");
    if (config.epochs <= 0) throw std::invalid_argument("fit: epochs must be positive");

    std::mt19937_64 rng(config.rng_seed);
    Optimizer opt;
    opt.adagrad = config.use_adagrad;
    opt.eta = config.eta;
    if (opt.adagrad) {
        opt.ent_acc.assign(params.ent.size(), 0.0);
        opt.rel_acc.assign(params.rel.size(), 0.0);
    }

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); i++) order[i] = i;

    TrainReport report;
    int stall = 0;
    double prev_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < config.epochs; epoch++) {
        const auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t examples = 0;
        for (const std::size_t idx : order) {
            const PathQuery& q = train[idx];
            const int y = (!q.label || *q.label) ? +1 : -1;
            double loss = train_example(params, q, y, config.lambda, opt);
            examples++;
            loss_sum += loss;
            if (!std::isfinite(loss))
                throw std::runtime_error("fit: non-finite loss on query " +
                                         describe_query(g, q));
            if (y > 0) {
                for (const PathQuery& neg :
                     sample_negatives(q, g, config.negatives_per_positive, rng)) {
                    loss = train_example(params, neg, -1, config.lambda, opt);
                    examples++;
                    loss_sum += loss;
                    if (!std::isfinite(loss))
                        throw std::runtime_error("fit: non-finite loss on sampled negative of " +
                                                 describe_query(g, q));
                }
            }
        }
        const double mean_loss = examples ? loss_sum / static_cast<double>(examples) : 0.0;
        report.epoch_loss.push_back(mean_loss);
        report.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        report.epochs_run = epoch + 1;

        if (prev_loss - mean_loss < 1e-6)
            stall++;
        else
            stall = 0;
        prev_loss = mean_loss;
        if (stall >= 10) break;
    }
    return report;
}

GridResult grid_search(ModelKind kind, const std::vector<GridPoint>& grid,
                       const std::vector<PathQuery>& train, const std::vector<PathQuery>& valid,
                       const KnowledgeGraph& train_graph, const KnowledgeGraph& truth_graph,
                       GridMetric metric) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");

    GridResult result;
    bool have_best = false;
    for (const GridPoint& point : grid) {
        double value = std::numeric_limits<double>::quiet_NaN();
        try {
            ModelParams params =
                init_params(kind, point.dims, train_graph.entities.size(),
                            train_graph.relations.size(), point.config.init_scale,
                            point.config.rng_seed);
            fit(params, train, train_graph, point.config);
            if (metric == GridMetric::MeanQuantile) {
                std::vector<PathQuery> positives;
                for (const PathQuery& q : valid)
                    if (!q.label || *q.label) positives.push_back(q);
                value = evaluate_ranking(params, positives, truth_graph).mq;
            } else {
                std::vector<PathQuery> labeled = valid;
                for (PathQuery& q : labeled)
                    if (!q.label) q.label = true;
                value = evaluate_classification(params, labeled).accuracy;
            }
            if (!have_best || value > result.best_metric) {
                result.best = point;
                result.best_metric = value;
                result.params = std::move(params);
                have_best = true;
            }
        } catch (const std::exception& e) {
            std::cerr << "grid_search: point failed, skipping: " << e.what() << "\n";
        }
        result.tried.emplace_back(point, value);
    }
    if (!have_best) throw std::runtime_error("grid_search: every grid point failed");
    return result;
}

}  // namespace kge
