#pragma once

#include "hrqhd/group_fourier.hpp"
#include "hrqhd/operators.hpp"

namespace hrqhd::linear {

enum class Gauge {
  MeanZero, // zero central-plane mean
  FarField, // boundary-shell average shifted to zero
};

struct PoissonOptions {
  /// Allowed |mean(g)| * sqrt(volume) / ||g||.
  double compat_tol = 1e-8;
  /// Drop an incompatible mean instead of failing.
  bool project_mean = false;
  Gauge gauge = Gauge::MeanZero;
  /// Shell width used by the far-field gauge.
  int shell = 6;
};

struct PoissonResult {
  ScalarField u;
  /// Mean of g removed before inversion (0 when compatible).
  double dropped_mean = 0.0;
};

/// Solves sign * sub-Laplacian(u) = g spectrally: sign = -1 gives -Lu = g.
PoissonResult solve_poisson(const ScalarField &g, int sign, const spectral::GroupFourier &gf,
                            const PoissonOptions &opts = {});

/// Coefficient form; the zero mode of the result is 0.
spectral::SpectralCoeffs solve_poisson_coeffs(const spectral::SpectralCoeffs &g, int sign,
                                              const spectral::GroupFourier &gf);

struct CgResult {
  ScalarField u;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Cross-check path: conjugate gradients on D^T D u = -sign g with D the
/// stacked discrete X, Y; the mean of g is projected out and the solution
/// has zero mean.
CgResult solve_poisson_cg(const ScalarField &g, int sign, const geom::HeisenbergCalculus &calc, double tol = 1e-10,
                          int max_iterations = 5000);

} // namespace hrqhd::linear
