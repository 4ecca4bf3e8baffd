#include "kge/models.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace kge {

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::BlockHole: return "blockhole";
        case ModelKind::Rescal: return "rescal";
        case ModelKind::DistMult: return "distmult";
        case ModelKind::Complex: return "complex";
        case ModelKind::Hole: return "hole";
        case ModelKind::TransE: return "transe";
    }
    throw std::logic_error("bad model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "blockhole") return ModelKind::BlockHole;
    if (name == "rescal") return ModelKind::Rescal;
    if (name == "distmult") return ModelKind::DistMult;
    if (name == "complex") return ModelKind::Complex;
    if (name == "hole") return ModelKind::Hole;
    if (name == "transe") return ModelKind::TransE;
    throw std::invalid_argument("unknown model kind: " + name);
}

std::size_t ModelParams::ent_stride() const {
    const std::size_t n = static_cast<std::size_t>(dims.n);
    switch (kind) {
        case ModelKind::BlockHole: return 2 * n;  // b blocks of m complex
        case ModelKind::Complex: return 2 * n;
        default: return n;
    }
}

std::size_t ModelParams::rel_stride() const {
    const std::size_t n = static_cast<std::size_t>(dims.n);
    switch (kind) {
        case ModelKind::BlockHole:
            return 2 * static_cast<std::size_t>(dims.b) * n;  // b*b blocks of m complex
        case ModelKind::Complex: return 2 * n;
        case ModelKind::Rescal: return n * n;
        default: return n;
    }
}

ModelParams init_params(ModelKind kind, ModelDims dims, std::size_t num_entities,
                        std::size_t num_relations, double scale, std::uint64_t rng_seed) {
    if (kind == ModelKind::BlockHole) {
        if (dims.b <= 0 || dims.m <= 0)
            throw std::invalid_argument("init_params: blockhole needs b > 0 and m > 0");
        dims.n = dims.b * dims.m;
    } else {
        if (dims.n <= 0) throw std::invalid_argument("init_params: need n > 0");
        dims.b = 0;
        dims.m = 0;
    }
    if (num_entities == 0 || num_relations == 0)
        throw std::invalid_argument("init_params: empty vocabulary");
    if (scale < 0) throw std::invalid_argument("init_params: negative scale");

    ModelParams p;
    p.kind = kind;
    p.dims = dims;
    p.num_entities = num_entities;
    p.num_relations = num_relations;
    p.ent.assign(num_entities * p.ent_stride(), 0.0);
    p.rel.assign(num_relations * p.rel_stride(), 0.0);
    if (scale > 0) {
        std::mt19937_64 rng(rng_seed);
        std::normal_distribution<double> gauss(0.0, scale);
        for (double& x : p.ent) x = gauss(rng);
        for (double& x : p.rel) x = gauss(rng);
    }
    return p;
}

namespace {

void check_ids(const ModelParams& p, Id s, const std::vector<Id>& path, Id o) {
    if (path.empty()) throw std::invalid_argument("score_path: empty path");
    if (s < 0 || static_cast<std::size_t>(s) >= p.num_entities || o < 0 ||
        static_cast<std::size_t>(o) >= p.num_entities)
        throw std::out_of_range("unknown entity id");
    for (const Id r : path)
        if (r < 0 || static_cast<std::size_t>(r) >= p.num_relations)
            throw std::out_of_range("unknown relation id");
}

inline Cx load_cx(const double* row, std::size_t idx) {
    return Cx(row[2 * idx], row[2 * idx + 1]);
}

// ---- BlockHolE kernels (ComplEx runs through them with b = 1) ----
//
// Entities are b blocks of C^m; a relation acts as the b x b block matrix
// with diagonal blocks diag(w^{(ij)}). Applying it is b^2 componentwise
// complex products per block row: O(bn) per hop, no n x n matrix anywhere.

// v <- W v, with (W v)^{(i)} = sum_j w^{(ij)} (.) v^{(j)}
CxVec apply_rel(const double* w, int b, int m, const CxVec& v) {
    const std::size_t bm = static_cast<std::size_t>(b) * static_cast<std::size_t>(m);
    CxVec out(bm, Cx(0, 0));
    for (int i = 0; i < b; i++)
        for (int j = 0; j < b; j++) {
            const double* blk = w + 2 * (static_cast<std::size_t>(i) * b + j) * m;
            for (int c = 0; c < m; c++)
                out[static_cast<std::size_t>(i) * m + c] +=
                    load_cx(blk, static_cast<std::size_t>(c)) *
                    v[static_cast<std::size_t>(j) * m + c];
        }
    return out;
}

// u <- W^T u (plain transpose, no conjugation)
CxVec apply_rel_t(const double* w, int b, int m, const CxVec& u) {
    const std::size_t bm = static_cast<std::size_t>(b) * static_cast<std::size_t>(m);
    CxVec out(bm, Cx(0, 0));
    for (int i = 0; i < b; i++)
        for (int j = 0; j < b; j++) {
            const double* blk = w + 2 * (static_cast<std::size_t>(i) * b + j) * m;
            for (int c = 0; c < m; c++)
                out[static_cast<std::size_t>(j) * m + c] +=
                    load_cx(blk, static_cast<std::size_t>(c)) *
                    u[static_cast<std::size_t>(i) * m + c];
        }
    return out;
}

CxVec load_entity_cx(const double* row, std::size_t bm, bool conjugate) {
    CxVec v(bm);
    for (std::size_t c = 0; c < bm; c++) {
        v[c] = load_cx(row, c);
        if (conjugate) v[c] = std::conj(v[c]);
    }
    return v;
}

double blockwise_path_score(const double* es, const std::vector<const double*>& ws,
                            const double* eo, int b, int m) {
    const std::size_t bm = static_cast<std::size_t>(b) * static_cast<std::size_t>(m);
    CxVec v = load_entity_cx(eo, bm, /*conjugate=*/true);
    for (auto it = ws.rbegin(); it != ws.rend(); ++it) v = apply_rel(*it, b, m, v);
    Cx acc(0, 0);
    for (std::size_t c = 0; c < bm; c++) acc += load_cx(es, c) * v[c];
    return acc.real();
}

// Fast BlockHolE triple score, one fused pass: sum_ij Re<w^(ij), es^(i), conj(eo^(j))>
double blockhole_triple_score(const double* es, const double* w, const double* eo, int b,
                              int m) {
    double acc = 0.0;
    for (int i = 0; i < b; i++)
        for (int j = 0; j < b; j++) {
            const double* blk = w + 2 * (static_cast<std::size_t>(i) * b + j) * m;
            const double* si = es + 2 * static_cast<std::size_t>(i) * m;
            const double* oj = eo + 2 * static_cast<std::size_t>(j) * m;
            for (int c = 0; c < m; c++) {
                const double wr = blk[2 * c], wi = blk[2 * c + 1];
                const double sr = si[2 * c], sj = si[2 * c + 1];
                const double orr = oj[2 * c], oi = oj[2 * c + 1];
                // Re(w * s * conj(o))
                acc += wr * (sr * orr + sj * oi) - wi * (sj * orr - sr * oi);
            }
        }
    return acc;
}

// ---- RESCAL kernels ----

RealVec rescal_matvec(const double* R, int n, const RealVec& v) {
    RealVec out(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; a++) {
        double acc = 0.0;
        const double* row = R + static_cast<std::size_t>(a) * n;
        for (int c = 0; c < n; c++) acc += row[c] * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(a)] = acc;
    }
    return out;
}

RealVec rescal_matvec_t(const double* R, int n, const RealVec& u) {
    RealVec out(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; a++) {
        const double ua = u[static_cast<std::size_t>(a)];
        const double* row = R + static_cast<std::size_t>(a) * n;
        for (int c = 0; c < n; c++) out[static_cast<std::size_t>(c)] += row[c] * ua;
    }
    return out;
}

// ---- HolE via its ComplEx-equivalent form ----
// w' = (1/n) F w, e' = F e; then Re<w', e'_s, conj(e'_o)> recovers
// w . ccorr(e_s, e_o), and path scores run through the same chain.

struct HoleCtx {
    CxVec es, eo;                // e'_s, e'_o
    std::vector<CxVec> ws;       // w'_{r_t} per hop
};

HoleCtx hole_fourier(const ModelParams& p, Id s, const std::vector<Id>& path, Id o) {
    const int n = p.dims.n;
    HoleCtx ctx;
    RealVec tmp(static_cast<std::size_t>(n));
    auto row_vec = [&](const double* row) {
        for (int c = 0; c < n; c++) tmp[static_cast<std::size_t>(c)] = row[c];
        return tmp;
    };
    ctx.es = dft(row_vec(p.ent_row(s)));
    ctx.eo = dft(row_vec(p.ent_row(o)));
    ctx.ws.reserve(path.size());
    for (const Id r : path) {
        CxVec w = dft(row_vec(p.rel_row(r)));
        for (Cx& c : w) c *= 1.0 / static_cast<double>(n);
        ctx.ws.push_back(std::move(w));
    }
    return ctx;
}

double complex_chain_score(const CxVec& es, const std::vector<CxVec>& ws, const CxVec& eo) {
    CxVec v = conj(eo);
    for (auto it = ws.rbegin(); it != ws.rend(); ++it)
        for (std::size_t c = 0; c < v.size(); c++) v[c] *= (*it)[c];
    Cx acc(0, 0);
    for (std::size_t c = 0; c < v.size(); c++) acc += es[c] * v[c];
    return acc.real();
}

}  // namespace

double score_path(const ModelParams& p, Id s, const std::vector<Id>& path, Id o) {
    check_ids(p, s, path, o);
    const int n = p.dims.n;
    const std::size_t k = path.size();

    switch (p.kind) {
        case ModelKind::BlockHole: {
            if (k == 1)
                return blockhole_triple_score(p.ent_row(s), p.rel_row(path[0]), p.ent_row(o),
                                              p.dims.b, p.dims.m);
            std::vector<const double*> ws(k);
            for (std::size_t t = 0; t < k; t++) ws[t] = p.rel_row(path[t]);
            return blockwise_path_score(p.ent_row(s), ws, p.ent_row(o), p.dims.b, p.dims.m);
        }
        case ModelKind::Complex: {
            std::vector<const double*> ws(k);
            for (std::size_t t = 0; t < k; t++) ws[t] = p.rel_row(path[t]);
            return blockwise_path_score(p.ent_row(s), ws, p.ent_row(o), 1, n);
        }
        case ModelKind::DistMult: {
            const double* es = p.ent_row(s);
            const double* eo = p.ent_row(o);
            double acc = 0.0;
            for (int c = 0; c < n; c++) {
                double prod = 1.0;
                for (std::size_t t = 0; t < k; t++) prod *= p.rel_row(path[t])[c];
                acc += es[c] * prod * eo[c];
            }
            return acc;
        }
        case ModelKind::Rescal: {
            RealVec v(p.ent_row(o), p.ent_row(o) + n);
            for (std::size_t t = k; t-- > 0;) v = rescal_matvec(p.rel_row(path[t]), n, v);
            const double* es = p.ent_row(s);
            double acc = 0.0;
            for (int c = 0; c < n; c++) acc += es[c] * v[static_cast<std::size_t>(c)];
            return acc;
        }
        case ModelKind::TransE: {
            const double* es = p.ent_row(s);
            const double* eo = p.ent_row(o);
            double acc = 0.0;
            for (int c = 0; c < n; c++) {
                double d = es[c] - eo[c];
                for (std::size_t t = 0; t < k; t++) d += p.rel_row(path[t])[c];
                acc += d * d;
            }
            return -acc;
        }
        case ModelKind::Hole: {
            HoleCtx ctx = hole_fourier(p, s, path, o);
            return complex_chain_score(ctx.es, ctx.ws, ctx.eo);
        }
    }
    throw std::logic_error("bad model kind");
}

double score_triple(const ModelParams& p, Id s, Id r, Id o) {
    return score_path(p, s, {r}, o);
}

double score_query(const ModelParams& p, const PathQuery& q) {
    return score_path(p, q.subject, q.path, q.object);
}

std::vector<double>& SparseGrad::slot(bool is_entity, Id id, std::size_t len) {
    for (GradSlot& s : slots)
        if (s.is_entity == is_entity && s.id == id) return s.g;
    slots.push_back({is_entity, id, std::vector<double>(len, 0.0)});
    return slots.back().g;
}

namespace {

// Gradient of the blockwise chain Re(es^T W_{r_1} ... W_{r_k} conj(eo)).
// Complex slots are (re, im) pairs: holomorphic factors contribute
// (Re d, -Im d), the conjugated object contributes (Re d, +Im d).
void blockwise_grad(SparseGrad& out, const ModelParams& p, Id s, const std::vector<Id>& path,
                    Id o, int b, int m) {
    const std::size_t k = path.size();
    const std::size_t bm = static_cast<std::size_t>(b) * static_cast<std::size_t>(m);

    std::vector<CxVec> vs(k + 1);
    vs[k] = load_entity_cx(p.ent_row(o), bm, /*conjugate=*/true);
    for (std::size_t t = k; t-- > 0;) vs[t] = apply_rel(p.rel_row(path[t]), b, m, vs[t + 1]);

    std::vector<CxVec> us(k + 1);
    us[0] = load_entity_cx(p.ent_row(s), bm, /*conjugate=*/false);
    for (std::size_t t = 0; t < k; t++) us[t + 1] = apply_rel_t(p.rel_row(path[t]), b, m, us[t]);

    std::vector<double>& gs = out.slot(true, s, 2 * bm);
    for (std::size_t c = 0; c < bm; c++) {
        gs[2 * c] += vs[0][c].real();
        gs[2 * c + 1] += -vs[0][c].imag();
    }
    std::vector<double>& go = out.slot(true, o, 2 * bm);
    for (std::size_t c = 0; c < bm; c++) {
        go[2 * c] += us[k][c].real();
        go[2 * c + 1] += us[k][c].imag();
    }
    const std::size_t rel_len = 2 * static_cast<std::size_t>(b) * bm;
    for (std::size_t t = 0; t < k; t++) {
        std::vector<double>& gw = out.slot(false, path[t], rel_len);
        for (int i = 0; i < b; i++)
            for (int j = 0; j < b; j++) {
                const std::size_t blk = 2 * (static_cast<std::size_t>(i) * b + j) * m;
                for (int c = 0; c < m; c++) {
                    const Cx d = us[t][static_cast<std::size_t>(i) * m + c] *
                                 vs[t + 1][static_cast<std::size_t>(j) * m + c];
                    gw[blk + 2 * static_cast<std::size_t>(c)] += d.real();
                    gw[blk + 2 * static_cast<std::size_t>(c) + 1] += -d.imag();
                }
            }
    }
}

void distmult_grad(SparseGrad& out, const ModelParams& p, Id s, const std::vector<Id>& path,
                   Id o) {
    const int n = p.dims.n;
    const std::size_t k = path.size();
    const std::size_t un = static_cast<std::size_t>(n);

    std::vector<RealVec> vs(k + 1);
    vs[k].assign(p.ent_row(o), p.ent_row(o) + n);
    for (std::size_t t = k; t-- > 0;) {
        vs[t] = vs[t + 1];
        const double* w = p.rel_row(path[t]);
        for (int c = 0; c < n; c++) vs[t][static_cast<std::size_t>(c)] *= w[c];
    }
    std::vector<RealVec> us(k + 1);
    us[0].assign(p.ent_row(s), p.ent_row(s) + n);
    for (std::size_t t = 0; t < k; t++) {
        us[t + 1] = us[t];
        const double* w = p.rel_row(path[t]);
        for (int c = 0; c < n; c++) us[t + 1][static_cast<std::size_t>(c)] *= w[c];
    }

    std::vector<double>& gs = out.slot(true, s, un);
    for (std::size_t c = 0; c < un; c++) gs[c] += vs[0][c];
    std::vector<double>& go = out.slot(true, o, un);
    for (std::size_t c = 0; c < un; c++) go[c] += us[k][c];
    for (std::size_t t = 0; t < k; t++) {
        std::vector<double>& gw = out.slot(false, path[t], un);
        for (std::size_t c = 0; c < un; c++) gw[c] += us[t][c] * vs[t + 1][c];
    }
}

void rescal_grad(SparseGrad& out, const ModelParams& p, Id s, const std::vector<Id>& path,
                 Id o) {
    const int n = p.dims.n;
    const std::size_t k = path.size();
    const std::size_t un = static_cast<std::size_t>(n);

    std::vector<RealVec> vs(k + 1);
    vs[k].assign(p.ent_row(o), p.ent_row(o) + n);
    for (std::size_t t = k; t-- > 0;) vs[t] = rescal_matvec(p.rel_row(path[t]), n, vs[t + 1]);
    std::vector<RealVec> us(k + 1);
    us[0].assign(p.ent_row(s), p.ent_row(s) + n);
    for (std::size_t t = 0; t < k; t++) us[t + 1] = rescal_matvec_t(p.rel_row(path[t]), n, us[t]);

    std::vector<double>& gs = out.slot(true, s, un);
    for (std::size_t c = 0; c < un; c++) gs[c] += vs[0][c];
    std::vector<double>& go = out.slot(true, o, un);
    for (std::size_t c = 0; c < un; c++) go[c] += us[k][c];
    for (std::size_t t = 0; t < k; t++) {
        std::vector<double>& gw = out.slot(false, path[t], un * un);
        for (std::size_t a = 0; a < un; a++)
            for (std::size_t c = 0; c < un; c++) gw[a * un + c] += us[t][a] * vs[t + 1][c];
    }
}

void transe_grad(SparseGrad& out, const ModelParams& p, Id s, const std::vector<Id>& path,
                 Id o) {
    const int n = p.dims.n;
    const std::size_t un = static_cast<std::size_t>(n);
    RealVec d(un);
    for (std::size_t c = 0; c < un; c++) d[c] = p.ent_row(s)[c] - p.ent_row(o)[c];
    for (const Id r : path)
        for (std::size_t c = 0; c < un; c++) d[c] += p.rel_row(r)[c];

    std::vector<double>& gs = out.slot(true, s, un);
    for (std::size_t c = 0; c < un; c++) gs[c] += -2.0 * d[c];
    std::vector<double>& go = out.slot(true, o, un);
    for (std::size_t c = 0; c < un; c++) go[c] += 2.0 * d[c];
    for (const Id r : path) {
        std::vector<double>& gw = out.slot(false, r, un);
        for (std::size_t c = 0; c < un; c++) gw[c] += -2.0 * d[c];
    }
}

// Chain rule back through the DFT images: w' = (1/n) F w, e' = F e.
void hole_grad(SparseGrad& out, const ModelParams& p, Id s, const std::vector<Id>& path, Id o) {
    const int n = p.dims.n;
    const std::size_t un = static_cast<std::size_t>(n);
    const std::size_t k = path.size();
    HoleCtx ctx = hole_fourier(p, s, path, o);

    std::vector<CxVec> vs(k + 1);
    vs[k] = conj(ctx.eo);
    for (std::size_t t = k; t-- > 0;) {
        vs[t] = vs[t + 1];
        for (std::size_t c = 0; c < un; c++) vs[t][c] *= ctx.ws[t][c];
    }
    std::vector<CxVec> us(k + 1);
    us[0] = ctx.es;
    for (std::size_t t = 0; t < k; t++) {
        us[t + 1] = us[t];
        for (std::size_t c = 0; c < un; c++) us[t + 1][c] *= ctx.ws[t][c];
    }

    CxVec gtmp = dft(vs[0]);
    std::vector<double>& gs = out.slot(true, s, un);
    for (std::size_t c = 0; c < un; c++) gs[c] += gtmp[c].real();
    gtmp = dft(conj(us[k]));
    std::vector<double>& go = out.slot(true, o, un);
    for (std::size_t c = 0; c < un; c++) go[c] += gtmp[c].real();

    // accumulate complex relation grads per unique relation before the
    // final transform (DFT is linear)
    std::vector<std::pair<Id, CxVec>> rel_acc;
    for (std::size_t t = 0; t < k; t++) {
        CxVec d(un);
        for (std::size_t c = 0; c < un; c++) d[c] = us[t][c] * vs[t + 1][c];
        bool merged = false;
        for (auto& [rid, acc] : rel_acc)
            if (rid == path[t]) {
                for (std::size_t c = 0; c < un; c++) acc[c] += d[c];
                merged = true;
                break;
            }
        if (!merged) rel_acc.emplace_back(path[t], std::move(d));
    }
    for (auto& [rid, acc] : rel_acc) {
        CxVec gw = dft(acc);
        std::vector<double>& slot = out.slot(false, rid, un);
        for (std::size_t c = 0; c < un; c++)
            slot[c] += gw[c].real() / static_cast<double>(n);
    }
}

}  // namespace

SparseGrad grad_path(const ModelParams& p, Id s, const std::vector<Id>& path, Id o) {
    check_ids(p, s, path, o);
    SparseGrad out;
    switch (p.kind) {
        case ModelKind::BlockHole: blockwise_grad(out, p, s, path, o, p.dims.b, p.dims.m); break;
        case ModelKind::Complex: blockwise_grad(out, p, s, path, o, 1, p.dims.n); break;
        case ModelKind::DistMult: distmult_grad(out, p, s, path, o); break;
        case ModelKind::Rescal: rescal_grad(out, p, s, path, o); break;
        case ModelKind::TransE: transe_grad(out, p, s, path, o); break;
        case ModelKind::Hole: hole_grad(out, p, s, path, o); break;
    }
    return out;
}

SparseGrad grad_triple(const ModelParams& p, Id s, Id r, Id o) {
    return grad_path(p, s, {r}, o);
}

}  // namespace kge
