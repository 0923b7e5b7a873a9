#pragma once

#include "hrqhd/group.hpp"
#include "hrqhd/group_fourier.hpp"
#include "hrqhd/operators.hpp"

namespace hrqhd::madelung {

struct PhysicalParams {
  double mass = 1.0;
  double c = 1.0;
  double hbar = 1.0;
  double L = 1.0; // reference horizontal length
  double T = 1.0; // reference time
};

struct Scaling {
  double epsilon;
  double upsilon;
};

/// upsilon = U/c and epsilon = hbar/(m U^2 T) with U = L/T.
Scaling nondimensionalize(const PhysicalParams &p);
/// (x, y, tau) -> (Lx, Ly, L^2 tau).
geom::GroupPoint dilation_map(const geom::GroupPoint &p, double L);

struct KGPState {
  ComplexField Phi;
  ComplexField Phi_t;
  ScalarField V;
  double epsilon = 1.0;
  double upsilon = 1.0;
};

struct HydroFields {
  ScalarField n;
  ScalarField S;
  ScalarField n_t;
  ScalarField S_t;
  ScalarField V;
};

/// Phi = sqrt(n) exp(iS/eps), Phi_t by the chain rule. Throws VacuumError
/// where n <= vacuum_threshold.
KGPState hydro_to_kgp(const HydroFields &h, double epsilon, double vacuum_threshold = 0.0);

enum class MomentumForm {
  /// Stencil differences of the local phase arg(conj(Phi_i) Phi_j) in x, y and
  /// the unwrapped phase in tau; reproduces the discrete X S, Y S.
  Covariant,
  /// eps Im(conj(Phi) X Phi)/n with X applied to Phi.
  Direct,
};

struct RecoveryOptions {
  /// min |Phi|^2 must be at least vacuum_fraction * nbar.
  double vacuum_fraction = 1e-6;
  double nbar = 1.0;
  MomentumForm form = MomentumForm::Covariant;
};

struct HydroRecovery {
  HydroFields h;
  HorizontalField grad_S;
  /// Mean dropped from div(grad S) before the phase Poisson solve.
  double dropped_mean = 0.0;
};

/// n = |Phi|^2, n_t = 2 Re(conj(Phi) Phi_t), S_t = eps Im(conj(Phi) Phi_t)/n,
/// grad S from the momentum formula; S from sub-Laplacian(S) = div(grad S)
/// with far-field gauge.
HydroRecovery kgp_to_hydro(const KGPState &k, const spectral::GroupFourier &gf, const geom::HeisenbergCalculus &calc,
                           const RecoveryOptions &opts = {});

/// Caller-supplied second time derivatives.
struct SecondDerivatives {
  ScalarField n_tt;
  ScalarField S_tt;
};

ScalarField residual_continuity(const HydroFields &h, const ScalarField &S_tt, double upsilon,
                                const geom::HeisenbergCalculus &calc);
ScalarField residual_hamilton_jacobi(const HydroFields &h, const ScalarField &n_tt, double epsilon, double upsilon,
                                     const geom::HeisenbergCalculus &calc);
HorizontalField residual_momentum(const HydroFields &h, const SecondDerivatives &d, double epsilon, double upsilon,
                                  const geom::HeisenbergCalculus &calc);

/// L2 norm over the interior of
///   (1/2) n grad|grad S|^2 - div(n grad S (x) grad S) + div(n grad S) grad S - n J(grad S) dtau S.
double convective_identity_defect(const ScalarField &n, const ScalarField &S, const geom::HeisenbergCalculus &calc);

/// Both sides of the identity as horizontal fields.
std::pair<HorizontalField, HorizontalField> convective_identity_sides(const ScalarField &n, const ScalarField &S,
                                                                const geom::HeisenbergCalculus &calc);

struct ReducedState {
  ScalarField rho, rho_t, rho_tt;
  ScalarField S, S_t, S_tt;
  ScalarField V;
  double nbar = 1.0;
};

struct ReducedResiduals {
  ScalarField wave_rho;  // rho_tt - L rho - rho(S_t^2 - 2S_t - |grad S|^2 - 2V)
  ScalarField wave_S;    // rho(S_tt - L S) - 2(rho_t + grad rho . grad S - rho_t S_t)
  ScalarField poisson;   // -L V - (rho^2 - nbar)
};

/// Residuals of the reduced (rho, S, V) system with the composed discrete
/// sub-Laplacian L from `calc`.
ReducedResiduals residual_reduced_system(const ReducedState &s, const geom::HeisenbergCalculus &calc);

} // namespace hrqhd::madelung
