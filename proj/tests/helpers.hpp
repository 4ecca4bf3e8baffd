#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kge/algebra.hpp"
#include "kge/dataset.hpp"
#include "kge/graph.hpp"
#include "kge/models.hpp"

namespace kge::test {

inline RealVec random_real_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealVec v(n);
    for (double& x : v) x = gauss(rng);
    return v;
}

inline CxVec random_cx_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CxVec v(n);
    for (Cx& x : v) x = Cx(gauss(rng), gauss(rng));
    return v;
}

// The family graph used throughout: a grandmother with four children,
// two of whom have children of their own.
inline KnowledgeGraph family_graph(bool with_inverses = true) {
    std::vector<Triple> triples = {
        {"elizabeth", "motherOf", "charles"}, {"elizabeth", "motherOf", "anne"},
        {"elizabeth", "motherOf", "andrew"},  {"elizabeth", "motherOf", "edward"},
        {"charles", "fatherOf", "william"},   {"charles", "fatherOf", "harry"},
        {"andrew", "fatherOf", "beatrice"},   {"andrew", "fatherOf", "eugenie"},
        {"charles", "brotherOf", "andrew"},   {"william", "brotherOf", "harry"},
    };
    KnowledgeGraph g = build_graph(triples);
    return with_inverses ? add_inverses(g) : g;
}

inline std::vector<Id> lookup_path(const KnowledgeGraph& g,
                                   const std::vector<std::string>& names) {
    std::vector<Id> path;
    for (const auto& name : names) path.push_back(*g.relations.lookup(name));
    return path;
}

// ---- dense complex matrix helpers for the block-circulant oracle ----

using CxMatrix = std::vector<CxVec>;  // row-major rows

inline CxVec matvec(const CxMatrix& M, const CxVec& v) {
    CxVec out(M.size(), Cx(0, 0));
    for (std::size_t i = 0; i < M.size(); i++)
        for (std::size_t j = 0; j < v.size(); j++) out[i] += M[i][j] * v[j];
    return out;
}

// n x n block matrix with (i,j) block the circulant whose DFT eigenvalues
// are the relation's Fourier-domain block w'^(ij); time-domain generator
// is idft(w'^(ij)).
inline CxMatrix dense_blockhole_relation(const ModelParams& p, Id r) {
    const int b = p.dims.b, m = p.dims.m;
    const std::size_t n = static_cast<std::size_t>(b) * static_cast<std::size_t>(m);
    CxMatrix M(n, CxVec(n, Cx(0, 0)));
    const double* row = p.rel_row(r);
    for (int i = 0; i < b; i++)
        for (int j = 0; j < b; j++) {
            CxVec w(static_cast<std::size_t>(m));
            const double* blk = row + 2 * (static_cast<std::size_t>(i) * b + j) * m;
            for (int c = 0; c < m; c++) w[static_cast<std::size_t>(c)] = Cx(blk[2 * c], blk[2 * c + 1]);
            const CxVec wt = idft(w);
            for (int a = 0; a < m; a++)
                for (int c = 0; c < m; c++)
                    M[static_cast<std::size_t>(i * m + a)][static_cast<std::size_t>(j * m + c)] =
                        wt[static_cast<std::size_t>((a - c + m) % m)];
        }
    return M;
}

// Dense oracle for the fast Fourier-domain path score: applies the
// materialized block-circulant matrices right to left between the
// transformed entity vectors.
inline double dense_blockhole_path_score(const ModelParams& p, Id s,
                                         const std::vector<Id>& path, Id o) {
    const int b = p.dims.b, m = p.dims.m;
    const std::size_t um = static_cast<std::size_t>(m);

    CxVec u, v;
    for (int i = 0; i < b; i++) {
        CxVec es(um), eo(um);
        const double* srow = p.ent_row(s) + 2 * static_cast<std::size_t>(i) * m;
        const double* orow = p.ent_row(o) + 2 * static_cast<std::size_t>(i) * m;
        for (int c = 0; c < m; c++) {
            es[static_cast<std::size_t>(c)] = Cx(srow[2 * c], srow[2 * c + 1]);
            eo[static_cast<std::size_t>(c)] = Cx(orow[2 * c], -orow[2 * c + 1]);
        }
        const CxVec ublk = dft(es);
        const CxVec vblk = idft(eo);
        u.insert(u.end(), ublk.begin(), ublk.end());
        v.insert(v.end(), vblk.begin(), vblk.end());
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it)
        v = matvec(dense_blockhole_relation(p, *it), v);
    Cx acc(0, 0);
    for (std::size_t c = 0; c < u.size(); c++) acc += u[c] * v[c];
    return acc.real();
}

// ---- finite-difference gradient oracle ----

// Central differences on every coordinate the analytic gradient claims
// to touch.
inline bool gradient_matches_fd(const ModelParams& params, Id s, const std::vector<Id>& path,
                                Id o, double h = 1e-4, double tol = 1e-4) {
    const SparseGrad grad = grad_path(params, s, path, o);
    ModelParams work = params;
    for (const GradSlot& slot : grad.slots) {
        double* row = slot.is_entity ? work.ent_row(slot.id) : work.rel_row(slot.id);
        for (std::size_t c = 0; c < slot.g.size(); c++) {
            const double saved = row[c];
            row[c] = saved + h;
            const double up = score_path(work, s, path, o);
            row[c] = saved - h;
            const double down = score_path(work, s, path, o);
            row[c] = saved;
            const double fd = (up - down) / (2 * h);
            const double an = slot.g[c];
            if (std::abs(fd - an) > tol * std::max({1.0, std::abs(fd), std::abs(an)}))
                return false;
        }
    }
    return true;
}

}  // namespace kge::test
