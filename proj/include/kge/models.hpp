#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kge/algebra.hpp"
#include "kge/graph.hpp"

namespace kge {

enum class ModelKind { BlockHole, Rescal, DistMult, Complex, Hole, TransE };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// BlockHole uses (b, m) with n = b*m; every other model uses n alone.
struct ModelDims {
    int n = 0;
    int b = 0;
    int m = 0;
};

// Uniform parameter store: one flat row per entity / relation.
//
// Row layouts (all little-endian f64 in checkpoints, same order in memory):
//   BlockHole entity:   (block, component, re/im)           -> 2*b*m reals
//   BlockHole relation: (block i, block j, component, re/im) -> 2*b*b*m reals
//   Complex entity/relation: (component, re/im)             -> 2*n reals
//   DistMult/Hole/TransE entity/relation:                   -> n reals
//   Rescal entity: n reals; relation: row-major n x n.
struct ModelParams {
    ModelKind kind = ModelKind::DistMult;
    ModelDims dims;
    std::size_t num_entities = 0;
    std::size_t num_relations = 0;
    std::vector<double> ent;
    std::vector<double> rel;

    std::size_t ent_stride() const;
    std::size_t rel_stride() const;
    double* ent_row(Id e) { return ent.data() + static_cast<std::size_t>(e) * ent_stride(); }
    const double* ent_row(Id e) const {
        return ent.data() + static_cast<std::size_t>(e) * ent_stride();
    }
    double* rel_row(Id r) { return rel.data() + static_cast<std::size_t>(r) * rel_stride(); }
    const double* rel_row(Id r) const {
        return rel.data() + static_cast<std::size_t>(r) * rel_stride();
    }
};

ModelParams init_params(ModelKind kind, ModelDims dims, std::size_t num_entities,
                        std::size_t num_relations, double scale, std::uint64_t rng_seed);

double score_triple(const ModelParams& p, Id s, Id r, Id o);
double score_path(const ModelParams& p, Id s, const std::vector<Id>& path, Id o);
double score_query(const ModelParams& p, const PathQuery& q);

// Sparse gradient of phi: one dense row per touched entity/relation.
// Complex parameters are differentiated as independent (re, im) reals.
struct GradSlot {
    bool is_entity;
    Id id;
    std::vector<double> g;
};

struct SparseGrad {
    std::vector<GradSlot> slots;
    // Find-or-add; repeated relations in a path accumulate into one slot.
    std::vector<double>& slot(bool is_entity, Id id, std::size_t len);
};

SparseGrad grad_triple(const ModelParams& p, Id s, Id r, Id o);
SparseGrad grad_path(const ModelParams& p, Id s, const std::vector<Id>& path, Id o);

}  // namespace kge
