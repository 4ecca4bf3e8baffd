#include "kge/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace kge {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
// (no normalization here).
void fft_pow2(CxVec& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; i++) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const Cx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Cx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; j++) {
                Cx u = a[i + j];
                Cx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein's algorithm: arbitrary-length DFT as a convolution of
// pow2-padded chirp sequences. Needed for lengths like 25 or 1000.
CxVec fft_bluestein(const CxVec& x, int sign) {
    const std::size_t n = x.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    CxVec chirp(n);
    for (std::size_t k = 0; k < n; k++) {
        // k^2 mod 2n keeps the angle argument small
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = Cx(std::cos(ang), std::sin(ang));
    }

    CxVec a(m, Cx(0, 0)), b(m, Cx(0, 0));
    for (std::size_t k = 0; k < n; k++) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; k++) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a, -1);
    fft_pow2(b, -1);
    for (std::size_t k = 0; k < m; k++) a[k] *= b[k];
    fft_pow2(a, +1);

    CxVec out(n);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; k++) out[k] = a[k] * inv_m * chirp[k];
    return out;
}

CxVec transform(CxVec x, int sign) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    if (x.size() == 1) return x;
    if (is_pow2(x.size())) {
        fft_pow2(x, sign);
        return x;
    }
    return fft_bluestein(x, sign);
}

void check_same_length(const RealVec& x, const RealVec& y, const char* op) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(op) + ": dimension mismatch");
    if (x.empty()) throw std::invalid_argument(std::string(op) + ": empty input");
}

}  // namespace

RealMatrix circ(const RealVec& v) {
    if (v.empty()) throw std::invalid_argument("circ: empty input");
    const std::size_t n = v.size();
    RealMatrix m;
    m.rows = m.cols = n;
    m.data.resize(n * n);
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = 0; j < n; j++)
            m.at(i, j) = v[(i + n - j) % n];
    return m;
}

RealVec cconv(const RealVec& x, const RealVec& y) {
    check_same_length(x, y, "cconv");
    const std::size_t n = x.size();
    RealVec out(n, 0.0);
    for (std::size_t i = 0; i < n; i++) {
        Real acc = 0.0;
        for (std::size_t j = 0; j < n; j++) acc += x[(i + n - j) % n] * y[j];
        out[i] = acc;
    }
    return out;
}

RealVec ccorr(const RealVec& x, const RealVec& y) {
    check_same_length(x, y, "ccorr");
    const std::size_t n = x.size();
    RealVec out(n, 0.0);
    for (std::size_t i = 0; i < n; i++) {
        Real acc = 0.0;
        for (std::size_t j = 0; j < n; j++) acc += x[(j + n - i) % n] * y[j];
        out[i] = acc;
    }
    return out;
}

RealVec cconv_fft(const RealVec& x, const RealVec& y) {
    check_same_length(x, y, "cconv");
    CxVec fx = dft(x), fy = dft(y);
    for (std::size_t i = 0; i < fx.size(); i++) fx[i] *= fy[i];
    CxVec z = idft(fx);
    RealVec out(z.size());
    for (std::size_t i = 0; i < z.size(); i++) out[i] = z[i].real();
    return out;
}

RealVec ccorr_fft(const RealVec& x, const RealVec& y) {
    check_same_length(x, y, "ccorr");
    CxVec fx = dft(x), fy = dft(y);
    for (std::size_t i = 0; i < fx.size(); i++) fx[i] = std::conj(fx[i]) * fy[i];
    CxVec z = idft(fx);
    RealVec out(z.size());
    for (std::size_t i = 0; i < z.size(); i++) out[i] = z[i].real();
    return out;
}

CxVec dft(const CxVec& x) { return transform(x, -1); }

CxVec dft(const RealVec& x) {
    CxVec cx(x.size());
    for (std::size_t i = 0; i < x.size(); i++) cx[i] = Cx(x[i], 0.0);
    return transform(std::move(cx), -1);
}

CxVec idft(const CxVec& x) {
    CxVec out = transform(x, +1);
    const double inv_n = 1.0 / static_cast<double>(out.size());
    for (Cx& c : out) c *= inv_n;
    return out;
}

Cx tri_prod(const CxVec& x, const CxVec& y, const CxVec& z) {
    if (x.size() != y.size() || y.size() != z.size())
        throw std::invalid_argument("tri_prod: dimension mismatch");
    Cx acc(0, 0);
    for (std::size_t i = 0; i < x.size(); i++) acc += x[i] * y[i] * z[i];
    return acc;
}

CxVec conj(const CxVec& x) {
    CxVec out(x.size());
    for (std::size_t i = 0; i < x.size(); i++) out[i] = std::conj(x[i]);
    return out;
}

}  // namespace kge
