#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kge/graph.hpp"
#include "kge/models.hpp"

namespace kge {

struct TrainConfig {
    double lambda = 0.0001;        // L2 weight
    double eta = 0.05;             // base learning rate
    int epochs = 500;
    int negatives_per_positive = 5;
    std::uint64_t rng_seed = 0;
    bool use_adagrad = true;       // plain SGD when false
    double init_scale = 0.1;
};

struct TrainReport {
    std::vector<double> epoch_loss;   // mean loss per epoch
    int epochs_run = 0;
    std::vector<double> epoch_seconds;
};

// log(1 + exp(-y * score)), stable softplus form. y in {+1, -1}.
double logistic_loss(double score, int y);

// k copies of q with the object resampled uniformly (never q's own
// object). Not filtered against ground truth.
std::vector<PathQuery> sample_negatives(const PathQuery& q, const KnowledgeGraph& g, int k,
                                        std::mt19937_64& rng);

// Per-example AdaGrad over logistic loss with lazy L2 on touched slots.
// Deterministic per seed. Queries labeled false train as y = -1 and draw
// no extra negatives.
TrainReport fit(ModelParams& params, const std::vector<PathQuery>& train,
                const KnowledgeGraph& g, const TrainConfig& config);

struct GridPoint {
    ModelDims dims;
    TrainConfig config;
};

enum class GridMetric { MeanQuantile, Accuracy };

struct GridResult {
    GridPoint best;
    ModelParams params;
    double best_metric = 0.0;
    std::vector<std::pair<GridPoint, double>> tried;  // failed points carry NaN
};

GridResult grid_search(ModelKind kind, const std::vector<GridPoint>& grid,
                       const std::vector<PathQuery>& train, const std::vector<PathQuery>& valid,
                       const KnowledgeGraph& train_graph, const KnowledgeGraph& truth_graph,
                       GridMetric metric);

}  // namespace kge
