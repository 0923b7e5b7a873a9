#pragma once

#include "hrqhd/group_fourier.hpp"
#include "hrqhd/operators.hpp"

#include <functional>
#include <vector>

namespace hrqhd::linear {

struct WaveState {
  ScalarField u;
  ScalarField u_t;
  double t = 0.0;
};

/// Samples of a source f at ascending instants.
struct SourceTrace {
  std::vector<double> times;
  std::vector<ScalarField> snapshots;

  /// Throws unless times are strictly increasing, sizes agree, and [t0, t1] is covered.
  void validate(double t0, double t1) const;
};

enum class Quadrature { Trapezoid, Simpson, Linear };

// Per-mode kernels, exact at a = 0 (a2 = 0).
double sin_over_a(double a, double t);        // sin(at)/a
double one_minus_cos_over_a2(double a, double t); // (1 - cos(at))/a^2

/// Weights (for u and for u_t) of each source sample in the Duhamel integral
/// from times.front() to T, for one frequency a.
void duhamel_weights(double a, const std::vector<double> &times, double T, Quadrature q, std::vector<double> &wu,
                     std::vector<double> &wut);

/// Duhamel propagation in coefficient space. The source samples start at the
/// initial time, which is times.front().
void propagate_coeffs(const spectral::GroupFourier &gf, const spectral::SpectralCoeffs &c0,
                      const spectral::SpectralCoeffs &c1, const std::vector<spectral::SpectralCoeffs> &f,
                      const std::vector<double> &times, double T, Quadrature q, spectral::SpectralCoeffs &cT,
                      spectral::SpectralCoeffs &ctT);

/// u_tt - sub-Laplacian u = f by the closed-form per-mode solution.
WaveState duhamel_propagate(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T,
                            const spectral::GroupFourier &gf, Quadrature q = Quadrature::Trapezoid);
WaveState duhamel_propagate(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T, int N,
                            Quadrature q = Quadrature::Trapezoid);

struct LeapfrogOptions {
  double c_cfl = 1.8;
  int power_iterations = 200;
};

/// Power-iteration estimate of the spectral radius of the discrete sub-Laplacian.
double spectral_radius_estimate(const geom::HeisenbergCalculus &calc, int iterations = 200);
/// Largest stable leapfrog step c_cfl / sqrt(rho).
double leapfrog_dt_bound(const geom::HeisenbergCalculus &calc, const LeapfrogOptions &opts = {});

struct LeapfrogResult {
  WaveState state;
  int steps = 0;
  double dt_bound = 0.0;
  /// Three-level energy ||(u^{n+1}-u^n)/dt||^2 - <u^{n+1}, L u^n> at the first and last step.
  double staggered_energy_first = 0.0;
  double staggered_energy_last = 0.0;
  /// ||u_t||^2 + ||grad u||^2 at t = 0 and at the final time.
  double energy_first = 0.0;
  double energy_last = 0.0;
};

/// Three-level central scheme with the composed sub-Laplacian. Throws
/// UnstableStepError if dt exceeds the computed bound.
LeapfrogResult leapfrog_propagate(const ScalarField &u0, const ScalarField &u1,
                                  const std::function<ScalarField(double)> &f, double T, double dt,
                                  const geom::HeisenbergCalculus &calc, const LeapfrogOptions &opts = {});

struct EnergyLemmaReport {
  // first-order estimate: sup(||u||_W1^2 + ||u_t||^2) against ||u0||_W1^2 + ||u1||^2 + T int ||f||^2
  double lhs_first = 0, rhs_first = 0, ratio_first = 0;
  // higher-order estimate with orders 5, 4, 3
  double lhs_high = 0, rhs_high = 0, ratio_high = 0;
  // u_ttt estimate
  double lhs_ttt = 0, rhs_ttt = 0, ratio_ttt = 0;
  double min_ratio = 0;
  bool pass = false;
};

/// Both sides of the wave energy estimates with all constants set to 1,
/// using spectral Sobolev norms sampled at the source times. Ratios are
/// RHS/LHS (infinite when LHS = 0); pass means min ratio >= 1/slack.
EnergyLemmaReport energy_lemma_check(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T,
                                     const spectral::GroupFourier &gf, double slack = 64.0);

} // namespace hrqhd::linear
