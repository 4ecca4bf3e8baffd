#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace kge {

using Id = std::int32_t;

struct Triple {
    std::string subject, relation, object;
};

struct IdTriple {
    Id s, r, o;
    bool operator<(const IdTriple& other) const {
        if (s != other.s) return s < other.s;
        if (r != other.r) return r < other.r;
        return o < other.o;
    }
    bool operator==(const IdTriple& other) const {
        return s == other.s && r == other.r && o == other.o;
    }
};

// Name <-> dense id mapping, ids assigned in first-seen order.
class Vocab {
  public:
    Id intern(const std::string& name);
    std::optional<Id> lookup(const std::string& name) const;
    const std::string& name(Id id) const { return names_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Id> ids_;
};

struct PathQuery {
    Id subject;
    std::vector<Id> path;  // length >= 1
    Id object;
    std::optional<bool> label;
};

// Immutable after build; all queries are read-only.
struct KnowledgeGraph {
    Vocab entities;
    Vocab relations;
    std::set<IdTriple> triples;
    // fwd[r][s] -> sorted object list
    std::vector<std::unordered_map<Id, std::vector<Id>>> fwd;
    // candidates_by_rel[r] = { o : exists s with (s,r,o) }
    std::vector<std::set<Id>> candidates_by_rel;

    bool has_triple(Id s, Id r, Id o) const { return triples.count({s, r, o}) > 0; }
    const std::vector<Id>& objects_of(Id s, Id r) const;
};

constexpr const char* kInverseSuffix = "_inv";

KnowledgeGraph build_graph(const std::vector<Triple>& triples);

// Adds r_inv with triple (o, r_inv, s) for every (s, r, o).
// Rejects graphs that already contain a relation ending in "_inv".
KnowledgeGraph add_inverses(const KnowledgeGraph& g);

bool path_holds(const KnowledgeGraph& g, const PathQuery& q);

std::set<Id> answer_set(const KnowledgeGraph& g, Id subject, const std::vector<Id>& path);

const std::set<Id>& candidate_set(const KnowledgeGraph& g, Id relation);

// Random walks of length uniform in [min_len, max_len]; dead ends are
// resampled. Deterministic per seed.
std::vector<PathQuery> sample_paths(const KnowledgeGraph& g, int min_len, int max_len,
                                    std::size_t count, std::uint64_t rng_seed);

}  // namespace kge
