#pragma once

#include <complex>
#include <vector>

// Real/complex vector arithmetic, circulant matrices, circular
// convolution/correlation and the DFT duality behind all scoring models.

namespace kge {

using Real = double;
using Cx = std::complex<double>;
using RealVec = std::vector<Real>;
using CxVec = std::vector<Cx>;

struct RealMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Real> data;  // row-major

    Real& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    Real at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// circ(v): n x n matrix with entry (i,j) = v[(i - j) mod n].
// Test oracle only; scoring never materializes circulant matrices.
RealMatrix circ(const RealVec& v);

// [x*y]_i = sum_j x[(i-j) mod n] * y[j], direct O(n^2) summation.
RealVec cconv(const RealVec& x, const RealVec& y);

// [x(star)y]_i = sum_j x[(j-i) mod n] * y[j].
RealVec ccorr(const RealVec& x, const RealVec& y);

// Transform-based counterparts, O(n log n) via FFT.
RealVec cconv_fft(const RealVec& x, const RealVec& y);
RealVec ccorr_fft(const RealVec& x, const RealVec& y);

// Unnormalized forward DFT (matrix F); inverse carries the 1/n factor.
// Arbitrary lengths are supported (radix-2 plus Bluestein).
CxVec dft(const CxVec& x);
CxVec dft(const RealVec& x);
CxVec idft(const CxVec& x);

// <x,y,z> = sum_i x_i y_i z_i. Caller takes Re() where needed.
Cx tri_prod(const CxVec& x, const CxVec& y, const CxVec& z);

CxVec conj(const CxVec& x);

}  // namespace kge
