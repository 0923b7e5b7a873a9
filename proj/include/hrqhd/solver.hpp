#pragma once

#include "hrqhd/group_fourier.hpp"
#include "hrqhd/operators.hpp"
#include "hrqhd/wave.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace hrqhd::solver {

struct IterationConfig {
  double nbar = 1.0;
  double delta = 0.25;
  /// Generic constant C of the estimates.
  double C_const = 1.0;
  /// C_m and m in a0 = C_m (1 + max rho~)^m / rho~_*^m.
  double C_m = 1.0;
  int m_exp = 10;
  double dt = 0.025;
  int picard_max = 30;
  double tol_low = 1e-8;
  /// Run horizon min(T0, T_final) when set, otherwise T_final.
  bool use_paper_T0 = true;
  double T_final = 0.5;
  linear::Quadrature quadrature = linear::Quadrature::Trapezoid;
  /// Equivalence tolerance; <= 0 selects 10 tol_low max(1, max|state|).
  double equivalence_tol = 0.0;
  double source_slack = 1e3;
  /// Base iterate: second-order Taylor extension of the data (true) or the
  /// data held constant in time (false).
  bool taylor_base = true;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct InitialData {
  ScalarField n0, n1, S0, S1;
};

/// One time level. rho_tt, S_tt and lap_S_tilde are caches filled from the
/// linearized equations.
struct HydroState {
  double t = 0.0;
  ScalarField rho, rho_t, S, S_t, rho_tilde, S_tilde, V;
  ScalarField rho_tt, S_tt, lap_S_tilde, lap_V;
};

struct Sources {
  ScalarField F1, F2, F3, F4, F5;
};

/// Evaluated on the pointwise state with the discrete horizontal gradient.
/// Throws VacuumError where rho~ is below the floor 1/4 sqrt(delta).
Sources compute_sources(const HydroState &U, const IterationConfig &cfg, const geom::HeisenbergCalculus &calc);

/// max |F4 rho~ + 2 rho_t - F1|.
double source_identity_defect(const HydroState &U, const Sources &F);

/// rho~(t) = exp(-E(t)) (1/2 int_0^t F1 exp(E(s)) ds + rho~0) with
/// E(t) = 1/2 int_0^t lap S~, all integrals by the trapezoid rule on the
/// trace samples (linear interpolation for a final partial interval).
ScalarField update_rho_tilde(const ScalarField &rho_tilde0, const linear::SourceTrace &F1,
                             const linear::SourceTrace &lap_S_tilde, double t);
/// Same rule, evaluated at every sample time of the traces (which must share times).
std::vector<ScalarField> rho_tilde_trajectory(const ScalarField &rho_tilde0, const linear::SourceTrace &F1,
                                              const linear::SourceTrace &lap_S_tilde);

/// C (||rho1||^2_W4 + ||S1||^2_W4 + ||rho0 - sqrt(nbar)||^2_W5 + ||S0||^2_W5).
double compute_M_star(const InitialData &d, const IterationConfig &cfg, const geom::HeisenbergCalculus &calc);
/// Same with the absolute rho0 norm (logged only).
double compute_M_star_absolute(const InitialData &d, const IterationConfig &cfg, const geom::HeisenbergCalculus &calc);
/// min(ln2/(CM), sqrt(delta)/(4CM^2), 1/(CM), 1/(12 C M^9)); +inf when M = 0.
double compute_T0(double M_star, const IterationConfig &cfg);
double compute_a0(double rho_tilde_max, double rho_tilde_min, const IterationConfig &cfg);
/// max{M, C(M^4 + M^6), C a0 (M^2 + a0 M^11)}.
double compute_frak_C(double M_star, double a0, const IterationConfig &cfg);

struct EnergyReport {
  double t = 0.0;
  // squared norms, deviation convention
  double S_W5 = 0, rho_W5 = 0;
  double S_t_W4 = 0, rho_t_W4 = 0;
  double rho_tilde_W3 = 0, rho_tilde_t_W3 = 0, S_tt_W3 = 0, rho_tt_W3 = 0, lap_V_W3 = 0, lap_S_tilde_W3 = 0;
  double lap_V_t_W1 = 0;
  double S_ttt_L2 = 0, rho_ttt_L2 = 0, lap_S_tilde_t_L2 = 0;
  double total = 0;
  double min_rho_tilde = 0;
  double frak_C = 0;
  bool member = false;

  static std::vector<std::string> column_names();
  std::vector<double> columns() const;
};

/// Time derivatives of one level that the energy needs beyond the state.
struct TimeDerivatives {
  ScalarField rho_tilde_t, S_ttt, rho_ttt, lap_S_tilde_t, lap_V_t;
};

EnergyReport energy_norm(const HydroState &U, const TimeDerivatives &d, double nbar, double frak_C,
                         const geom::HeisenbergCalculus &calc);

struct LowNorm {
  // sup over t of each norm
  double rho_W1 = 0, rho_t_L2 = 0, S_W1 = 0, S_t_L2 = 0, rho_tilde_L2 = 0;
  /// sqrt(sup_t of the sum of squares).
  double total = 0;
};

struct ContractionRow {
  int j = 0;
  LowNorm norm;
  /// ||Y^{j+1}|| / ||Y^j||; NaN for the first row.
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct ContractionLog {
  std::vector<ContractionRow> rows;
  /// Last three ratios below 1.
  bool geometric_decay() const;
};

using Trajectory = std::vector<HydroState>;

struct EquivalenceRow {
  double t = 0;
  double rho_defect_inf = 0;   // ||rho~ - rho||_inf
  double S_defect_inf = 0;     // ||S~ - S||_inf
  double lap_S_defect_L2 = 0;  // ||L(S~ - S)||_L2 with the discrete sub-Laplacian
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  double max_rho = 0, max_S = 0, max_lap = 0;
  double tolerance = 0;
  bool pass = false;
};

EquivalenceReport equivalence_check(const Trajectory &traj, double tolerance, const geom::HeisenbergCalculus &calc);

struct SourceBoundRow {
  double t = 0;
  double lhs[5] = {0, 0, 0, 0, 0};
  double rhs[5] = {0, 0, 0, 0, 0};
};

struct SourceBoundReport {
  double M_star = 0, M_eff = 0, a0 = 0, slack = 0;
  std::vector<SourceBoundRow> rows;
  double max_ratio[5] = {0, 0, 0, 0, 0};
  bool pass = false;
};

/// Lemma-type source bounds with word-based norms; time derivatives by
/// differencing the source traces. Polynomial right-hand sides use
/// max(M*, 1).
SourceBoundReport source_bound_check(const Trajectory &traj, const std::vector<Sources> &F, double M_star,
                                     const IterationConfig &cfg, const geom::HeisenbergCalculus &calc);

struct ReducedResidualReport {
  /// Interior L2 norms, sup over time, with the configured FD order p; the
  /// Poisson residual is taken modulo its mean.
  double wave_rho = 0, wave_S = 0, poisson = 0;
  /// Same residuals with FD order p + 2 (6 when p = 8).
  double wave_rho_hi = 0, wave_S_hi = 0, poisson_hi = 0;
  /// Richardson estimate of the order-p operator error on the trajectory:
  /// 2 sup_t ||R_p - R_{p+2}||.
  double budget_rho = 0, budget_S = 0, budget_poisson = 0;
  double floor = 0;
  bool pass = false;
};

ReducedResidualReport reduced_residual_check(const Trajectory &traj, const IterationConfig &cfg,
                                             const geom::HeisenbergCalculus &calc);

enum class RunStatus { Converged, NonContraction, Vacuum };

struct RunResult {
  RunStatus status = RunStatus::Converged;
  std::string message;
  double M_star = 0, M_star_absolute = 0, T0 = 0, T = 0, dt = 0, a0 = 0, frak_C = 0;
  int iterations = 0;
  Trajectory trajectory;
  std::vector<Sources> sources;
  ContractionLog log;
  std::vector<EnergyReport> energy;
  EquivalenceReport equivalence;
  SourceBoundReport source_bounds;
  ReducedResidualReport reduced;
  double min_rho_tilde = 0;
  double positivity_floor = 0;     // 1/4 sqrt(delta)
  double inherited_floor = 0;      // 1/4 min sqrt(n0)
  double max_source_identity = 0;  // over the final trajectory
  bool membership = true;
  // vacuum location when status == Vacuum
  double vac_t = 0, vac_x = 0, vac_y = 0, vac_tau = 0, vac_value = 0;
};

struct RunOptions {
  bool energy = true;
  bool source_bounds = true;
  bool reduced_residuals = true;
  std::function<void(const ContractionRow &)> on_iteration;
};

/// Picard iteration for the extended system with spectral propagation.
class PicardSolver {
public:
  PicardSolver(const spectral::GroupFourier &gf, const geom::HeisenbergCalculus &calc, IterationConfig cfg);

  const IterationConfig &config() const { return m_cfg; }

  /// rho = rho~ = sqrt(n0), rho_t = n1/(2 sqrt(n0)), S = S0, S_t = S1, deviations
  /// projected onto the spectral span; V and S~ from their elliptic equations,
  /// rho_tt and S_tt from the wave equations at t = 0. Throws VacuumError when
  /// min n0 < delta.
  HydroState init_state(const InitialData &d) const;

  /// Base iterate at the given times: U0 + t U0_t + t^2/2 U0_tt for (rho, S)
  /// with rho~ = rho and V, S~ from their elliptic equations, or U0 itself
  /// when the config asks for a constant base.
  Trajectory base_trajectory(const HydroState &U0, const std::vector<double> &times) const;

  /// One linearized solve. `sources_out` receives F(U^j) at each time.
  Trajectory picard_step(const Trajectory &Uj, std::vector<Sources> *sources_out = nullptr) const;

  LowNorm low_norm(const Trajectory &a, const Trajectory &b) const;

  /// Time derivatives of each level by second-order differencing of the stored traces.
  std::vector<TimeDerivatives> time_derivatives(const Trajectory &traj) const;

  RunResult run(const InitialData &d, const RunOptions &opts = {}) const;

private:
  ScalarField dev_rho(const ScalarField &rho) const;
  const spectral::GroupFourier &m_gf;
  const geom::HeisenbergCalculus &m_calc;
  IterationConfig m_cfg;
};

} // namespace hrqhd::solver
