#pragma once

#include "hrqhd/grid.hpp"

namespace hrqhd::fft {

// Thin wrappers over FFTW with a process-wide plan cache. All transforms are
// unnormalized and act on `howmany` contiguous lines of length n.

void r2c_lines(const double *in, cplx *out, int n, int howmany);
void c2r_lines(const cplx *in, double *out, int n, int howmany);
void c2c_lines(const cplx *in, cplx *out, int n, int howmany, int sign);
/// Row-major n0 x n1 array.
void c2c_2d(const cplx *in, cplx *out, int n0, int n1, int sign);

/// Signed integer frequency of FFT bin m for length n (Nyquist reported as +n/2).
inline int signed_bin(int m, int n) { return m <= n / 2 ? m : m - n; }

} // namespace hrqhd::fft
