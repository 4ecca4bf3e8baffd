#include "kge/graph.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace kge {

Id Vocab::intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    const Id id = static_cast<Id>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
}

std::optional<Id> Vocab::lookup(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::vector<Id>& KnowledgeGraph::objects_of(Id s, Id r) const {
    static const std::vector<Id> kEmpty;
    if (r < 0 || static_cast<std::size_t>(r) >= fwd.size())
        throw std::out_of_range("unknown relation id");
    auto it = fwd[static_cast<std::size_t>(r)].find(s);
    return it == fwd[static_cast<std::size_t>(r)].end() ? kEmpty : it->second;
}

namespace {

void rebuild_indexes(KnowledgeGraph& g) {
    g.fwd.assign(g.relations.size(), {});
    g.candidates_by_rel.assign(g.relations.size(), {});
    for (const IdTriple& t : g.triples) {
        g.fwd[static_cast<std::size_t>(t.r)][t.s].push_back(t.o);
        g.candidates_by_rel[static_cast<std::size_t>(t.r)].insert(t.o);
    }
    for (auto& by_subject : g.fwd)
        for (auto& [s, objs] : by_subject) std::sort(objs.begin(), objs.end());
}

void check_entity(const KnowledgeGraph& g, Id e) {
    if (e < 0 || static_cast<std::size_t>(e) >= g.entities.size())
        throw std::out_of_range("unknown entity id");
}

void check_relation(const KnowledgeGraph& g, Id r) {
    if (r < 0 || static_cast<std::size_t>(r) >= g.relations.size())
        throw std::out_of_range("unknown relation id");
}

}  // namespace

KnowledgeGraph build_graph(const std::vector<Triple>& triples) {
    if (triples.empty()) throw std::invalid_argument("build_graph: empty triple list");
    KnowledgeGraph g;
    for (const Triple& t : triples) {
        // '/' is the reserved path separator
        if (t.relation.find('/') != std::string::npos)
            throw std::invalid_argument("build_graph: relation name contains '/': " + t.relation);
        const Id s = g.entities.intern(t.subject);
        const Id r = g.relations.intern(t.relation);
        const Id o = g.entities.intern(t.object);
        g.triples.insert({s, r, o});
    }
    rebuild_indexes(g);
    return g;
}

KnowledgeGraph add_inverses(const KnowledgeGraph& g) {
    const std::string suffix = kInverseSuffix;
    for (const std::string& name : g.relations.names()) {
        if (name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            throw std::invalid_argument("add_inverses: relation '" + name +
                                        "' ends with reserved suffix " + suffix);
    }
    KnowledgeGraph out;
    out.entities = g.entities;
    out.relations = g.relations;
    out.triples = g.triples;
    for (const std::string& name : g.relations.names()) out.relations.intern(name + suffix);
    const Id n_orig = static_cast<Id>(g.relations.size());
    for (const IdTriple& t : g.triples) out.triples.insert({t.o, t.r + n_orig, t.s});
    rebuild_indexes(out);
    return out;
}

std::set<Id> answer_set(const KnowledgeGraph& g, Id subject, const std::vector<Id>& path) {
    check_entity(g, subject);
    if (path.empty()) throw std::invalid_argument("answer_set: empty path");
    std::set<Id> frontier{subject};
    for (const Id r : path) {
        check_relation(g, r);
        std::set<Id> next;
        for (const Id h : frontier)
            for (const Id t : g.objects_of(h, r)) next.insert(t);
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return frontier;
}

bool path_holds(const KnowledgeGraph& g, const PathQuery& q) {
    check_entity(g, q.object);
    return answer_set(g, q.subject, q.path).count(q.object) > 0;
}

const std::set<Id>& candidate_set(const KnowledgeGraph& g, Id relation) {
    check_relation(g, relation);
    return g.candidates_by_rel[static_cast<std::size_t>(relation)];
}

std::vector<PathQuery> sample_paths(const KnowledgeGraph& g, int min_len, int max_len,
                                    std::size_t count, std::uint64_t rng_seed) {
    if (min_len < 2 || max_len < min_len)
        throw std::invalid_argument("sample_paths: need max_len >= min_len >= 2");
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<Id> pick_entity(0, static_cast<Id>(g.entities.size()) - 1);
    std::uniform_int_distribution<int> pick_len(min_len, max_len);

    // out-edge list per entity, sorted for determinism
    std::vector<std::vector<std::pair<Id, Id>>> out_edges(g.entities.size());
    for (const IdTriple& t : g.triples)
        out_edges[static_cast<std::size_t>(t.s)].emplace_back(t.r, t.o);

    std::vector<PathQuery> result;
    result.reserve(count);
    constexpr int kMaxRetries = 1000;
    while (result.size() < count) {
        bool emitted = false;
        for (int attempt = 0; attempt < kMaxRetries && !emitted; attempt++) {
            const Id start = pick_entity(rng);
            const int len = pick_len(rng);
            Id cur = start;
            std::vector<Id> rels;
            rels.reserve(static_cast<std::size_t>(len));
            for (int hop = 0; hop < len; hop++) {
                const auto& edges = out_edges[static_cast<std::size_t>(cur)];
                if (edges.empty()) break;
                std::uniform_int_distribution<std::size_t> pick_edge(0, edges.size() - 1);
                const auto& [r, o] = edges[pick_edge(rng)];
                rels.push_back(r);
                cur = o;
            }
            if (static_cast<int>(rels.size()) == len) {
                result.push_back({start, std::move(rels), cur, true});
                emitted = true;
            }
        }
        if (!emitted)
            throw std::runtime_error("sample_paths: retry limit hit (graph full of dead ends)");
    }
    return result;
}

}  // namespace kge
