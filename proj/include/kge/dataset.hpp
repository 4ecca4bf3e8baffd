#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kge/graph.hpp"
#include "kge/models.hpp"

namespace kge {

// Name-level path query; ids are assigned when resolved against a graph.
struct RawPathQuery {
    std::string subject;
    std::vector<std::string> relations;
    std::string object;
    std::optional<bool> label;
};

struct DatasetBundle {
    std::vector<Triple> base_train, base_valid, base_test;
    std::vector<RawPathQuery> path_train, path_valid;
    std::vector<RawPathQuery> path_test_deduction, path_test_induction;
};

// One triple per line: subject<TAB>relation<TAB>object. UTF-8, no
// header; blank lines and '#' comments skipped; CRLF tolerated.
std::vector<Triple> load_triples(const std::string& file);
void save_triples(const std::string& file, const std::vector<Triple>& triples);

// subject<TAB>r1/r2/.../rk<TAB>object[<TAB>label] with label 1 or 0.
std::vector<RawPathQuery> load_paths(const std::string& file);
void save_paths(const std::string& file, const std::vector<RawPathQuery>& queries);

// Rejects names absent from the graph's vocabularies.
std::vector<PathQuery> resolve_queries(const KnowledgeGraph& g,
                                       const std::vector<RawPathQuery>& raw);
std::vector<PathQuery> triples_as_queries(const KnowledgeGraph& g,
                                          const std::vector<Triple>& triples);

// Versioned binary checkpoint: model kind, dims, vocabularies by name,
// then little-endian f64 tables (entities first).
struct Checkpoint {
    ModelParams params;
    std::vector<std::string> entity_names;
    std::vector<std::string> relation_names;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path,
                           std::optional<ModelKind> expected_kind = std::nullopt);

// Synthetic order-discrimination benchmark: family units where
// parents -> religion is a meaningful relation order and the reversed
// order never holds. Positives are emitted twice per unit, reversed
// negatives once; units split 80/10/10 into train/valid/test.
DatasetBundle gen_order_benchmark(int n_families, std::uint64_t rng_seed);

}  // namespace kge
