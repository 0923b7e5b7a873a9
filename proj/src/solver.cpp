#include "hrqhd/solver.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/madelung.hpp"
#include "hrqhd/poisson.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hrqhd::solver {

using geom::HeisenbergCalculus;
using linear::SourceTrace;
using spectral::GroupFourier;
using spectral::SpectralCoeffs;

void IterationConfig::validate() const {
  auto positive = [](double v, const char *key) {
    if (!(v > 0) || !std::isfinite(v))
      throw ConfigError(std::string(key) + ": must be positive");
  };
  positive(nbar, "physics.nbar");
  positive(delta, "physics.delta");
  positive(C_const, "iteration.C_const");
  positive(C_m, "iteration.C_m");
  positive(dt, "iteration.dt");
  positive(tol_low, "iteration.tol_low");
  positive(T_final, "iteration.T_final");
  positive(source_slack, "iteration.source_slack");
  if (m_exp < 10)
    throw ConfigError("iteration.m_exp: must be an integer >= 10");
  if (picard_max < 1)
    throw ConfigError("iteration.picard_max: must be >= 1");
  if (quadrature == linear::Quadrature::Simpson)
    throw ConfigError("solver.quadrature: the Picard driver restarts every substep; use trapezoid or linear");
}

namespace {

double floor_of(const IterationConfig &cfg) { return 0.25 * std::sqrt(cfg.delta); }

[[noreturn]] void vacuum_at(const ScalarField &u, std::size_t n, double t, const char *what) {
  const Grid3 &g = u.grid();
  const int k = int(n % g.ntau);
  const int j = int((n / g.ntau) % g.ny);
  const int i = int(n / (std::size_t(g.ntau) * g.ny));
  std::ostringstream os;
  os << what << " " << u[n] << " at t=" << t << " (x=" << g.x(i) << ", y=" << g.y(j) << ", tau=" << g.tau(k) << ")";
  throw VacuumError(os.str(), t, g.x(i), g.y(j), g.tau(k), u[n]);
}

void check_floor(const ScalarField &u, double floor, double t, const char *what) {
  for (std::size_t n = 0; n < u.size(); ++n)
    if (!(u[n] >= floor))
      vacuum_at(u, n, t, what);
}

ScalarField shifted(const ScalarField &u, double c) {
  ScalarField r = u;
  r += c;
  return r;
}

// Second-order differences of a uniformly or nonuniformly sampled trace.
std::vector<ScalarField> differentiate(const std::vector<const ScalarField *> &f, const std::vector<double> &t) {
  const std::size_t n = f.size();
  std::vector<ScalarField> d;
  d.reserve(n);
  const Grid3 &g = f[0]->grid();
  for (std::size_t m = 0; m < n; ++m) {
    ScalarField r(g);
    if (n == 1) {
      d.push_back(std::move(r));
      continue;
    }
    std::size_t i0, i1, i2;
    if (n == 2) {
      const double h = t[1] - t[0];
      for (std::size_t p = 0; p < r.size(); ++p)
        r[p] = ((*f[1])[p] - (*f[0])[p]) / h;
      d.push_back(std::move(r));
      continue;
    }
    if (m == 0)
      i0 = 0, i1 = 1, i2 = 2;
    else if (m == n - 1)
      i0 = n - 3, i1 = n - 2, i2 = n - 1;
    else
      i0 = m - 1, i1 = m, i2 = m + 1;
    // derivative of the quadratic through (t_i0, t_i1, t_i2) at t_m
    const double x = t[m], a = t[i0], b = t[i1], c = t[i2];
    const double w0 = (2 * x - b - c) / ((a - b) * (a - c));
    const double w1 = (2 * x - a - c) / ((b - a) * (b - c));
    const double w2 = (2 * x - a - b) / ((c - a) * (c - b));
    for (std::size_t p = 0; p < r.size(); ++p)
      r[p] = w0 * (*f[i0])[p] + w1 * (*f[i1])[p] + w2 * (*f[i2])[p];
    d.push_back(std::move(r));
  }
  return d;
}

double sq(double x) { return x * x; }

double w_sq(const ScalarField &u, int k, const HeisenbergCalculus &calc) { return sq(geom::sobolev_norm(u, k, calc)); }

// Trapezoid integrating factor over samples s (times), F (F1), L (lap S~).
std::vector<ScalarField> integrate_rho_tilde(const ScalarField &rho0, const std::vector<double> &s,
                                             const std::vector<const ScalarField *> &F,
                                             const std::vector<const ScalarField *> &L) {
  const std::size_t n = s.size();
  const std::size_t sz = rho0.size();
  std::vector<double> E(sz, 0.0), I(sz, 0.0), eprev(sz, 1.0);
  std::vector<ScalarField> out;
  out.reserve(n);
  out.push_back(rho0);
  for (std::size_t m = 1; m < n; ++m) {
    const double h = s[m] - s[m - 1];
    ScalarField r(rho0.grid());
    const ScalarField &F0 = *F[m - 1], &F1 = *F[m], &L0 = *L[m - 1], &L1 = *L[m];
    for (std::size_t p = 0; p < sz; ++p) {
      E[p] += 0.25 * h * (L0[p] + L1[p]);
      const double e = std::exp(E[p]);
      I[p] += 0.25 * h * (F0[p] * eprev[p] + F1[p] * e);
      eprev[p] = e;
      r[p] = (I[p] + rho0[p]) / e;
    }
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace

Sources compute_sources(const HydroState &U, const IterationConfig &cfg, const HeisenbergCalculus &calc) {
  check_floor(U.rho_tilde, floor_of(cfg), U.t, "compute_sources: rho~ below the vacuum floor:");
  const double sb = std::sqrt(cfg.nbar);
  const HorizontalField gr = calc.gradient(shifted(U.rho, -sb));
  const HorizontalField gS = calc.gradient(U.S);
  const Grid3 &g = U.rho.grid();
  Sources F{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double rho = U.rho[p], rt = U.rho_t[p], St = U.S_t[p], Stt = U.S_tt[p], rtil = U.rho_tilde[p];
    const double cross = gr.a[p] * gS.a[p] + gr.b[p] * gS.b[p];
    const double g2 = gS.a[p] * gS.a[p] + gS.b[p] * gS.b[p];
    F.F1[p] = rho * Stt + 2 * St * rt - 2 * cross;
    F.F2[p] = rho * (St * St - 2 * St - g2 - 2 * U.V[p]);
    F.F3[p] = 2.0 / rtil * (rt + cross - rt * St);
    F.F4[p] = (rho * Stt + 2 * St * rt - 2 * cross - 2 * rt) / rtil;
    F.F5[p] = (rho - sb) * (rho + sb);
  }
  return F;
}

double source_identity_defect(const HydroState &U, const Sources &F) {
  double m = 0.0;
  for (std::size_t p = 0; p < F.F1.size(); ++p)
    m = std::max(m, std::abs(F.F4[p] * U.rho_tilde[p] + 2 * U.rho_t[p] - F.F1[p]));
  return m;
}

std::vector<ScalarField> rho_tilde_trajectory(const ScalarField &rho_tilde0, const SourceTrace &F1,
                                              const SourceTrace &lap) {
  F1.validate(F1.times.front(), F1.times.back());
  lap.validate(F1.times.front(), F1.times.back());
  if (F1.times != lap.times)
    throw PreconditionError("rho_tilde_trajectory: traces must share sample times");
  std::vector<const ScalarField *> F, L;
  for (std::size_t m = 0; m < F1.times.size(); ++m) {
    F.push_back(&F1.snapshots[m]);
    L.push_back(&lap.snapshots[m]);
  }
  return integrate_rho_tilde(rho_tilde0, F1.times, F, L);
}

ScalarField update_rho_tilde(const ScalarField &rho_tilde0, const SourceTrace &F1, const SourceTrace &lap, double t) {
  const double t0 = F1.times.front();
  if (t <= t0)
    return rho_tilde0;
  F1.validate(t0, t);
  lap.validate(t0, t);
  if (F1.times != lap.times)
    throw PreconditionError("update_rho_tilde: traces must share sample times");
  std::vector<double> s;
  std::vector<const ScalarField *> F, L;
  std::size_t m = 0;
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  for (; m < F1.times.size() && F1.times[m] <= t + tol; ++m) {
    s.push_back(F1.times[m]);
    F.push_back(&F1.snapshots[m]);
    L.push_back(&lap.snapshots[m]);
  }
  ScalarField Fi, Li;
  if (std::abs(s.back() - t) > tol) {
    const double a = (t - F1.times[m - 1]) / (F1.times[m] - F1.times[m - 1]);
    Fi = (1 - a) * F1.snapshots[m - 1] + a * F1.snapshots[m];
    Li = (1 - a) * lap.snapshots[m - 1] + a * lap.snapshots[m];
    s.push_back(t);
    F.push_back(&Fi);
    L.push_back(&Li);
  }
  return integrate_rho_tilde(rho_tilde0, s, F, L).back();
}

namespace {

struct DataNorms {
  double rho1_W4, S1_W4, rho0_W5, S0_W5;
};

DataNorms data_norms(const InitialData &d, double shift, const HeisenbergCalculus &calc) {
  const ScalarField rho0 = map(d.n0, [](double v) { return std::sqrt(v); });
  ScalarField rho1(d.n0.grid());
  for (std::size_t p = 0; p < rho1.size(); ++p)
    rho1[p] = d.n1[p] / (2 * rho0[p]);
  return {w_sq(rho1, 4, calc), w_sq(d.S1, 4, calc), w_sq(shifted(rho0, -shift), 5, calc), w_sq(d.S0, 5, calc)};
}

} // namespace

double compute_M_star(const InitialData &d, const IterationConfig &cfg, const HeisenbergCalculus &calc) {
  const DataNorms n = data_norms(d, std::sqrt(cfg.nbar), calc);
  return cfg.C_const * (n.rho1_W4 + n.S1_W4 + n.rho0_W5 + n.S0_W5);
}

double compute_M_star_absolute(const InitialData &d, const IterationConfig &cfg, const HeisenbergCalculus &calc) {
  const DataNorms n = data_norms(d, 0.0, calc);
  return cfg.C_const * (n.rho1_W4 + n.S1_W4 + n.rho0_W5 + n.S0_W5);
}

double compute_T0(double M, const IterationConfig &cfg) {
  if (M <= 0)
    return std::numeric_limits<double>::infinity();
  const double C = cfg.C_const;
  return std::min({std::numbers::ln2 / (C * M), std::sqrt(cfg.delta) / (4 * C * M * M), 1.0 / (C * M),
                   1.0 / (12 * C * std::pow(M, 9))});
}

double compute_a0(double rho_tilde_max, double rho_tilde_min, const IterationConfig &cfg) {
  return cfg.C_m * std::pow((1 + rho_tilde_max) / rho_tilde_min, cfg.m_exp);
}

double compute_frak_C(double M, double a0, const IterationConfig &cfg) {
  const double C = cfg.C_const;
  return std::max({M, C * (std::pow(M, 4) + std::pow(M, 6)), C * a0 * (M * M + a0 * std::pow(M, 11))});
}

std::vector<std::string> EnergyReport::column_names() {
  return {"t",           "S_W5",       "rho_W5",       "S_t_W4",        "rho_t_W4",          "rho_tilde_W3",
          "rho_tilde_t_W3", "S_tt_W3", "rho_tt_W3",    "lapV_W3",       "lapS_tilde_W3",     "lapV_t_W1",
          "S_ttt_L2",    "rho_ttt_L2", "lapS_tilde_t_L2", "total",      "min_rho_tilde",     "membership"};
}

std::vector<double> EnergyReport::columns() const {
  return {t,         S_W5,     rho_W5,   S_t_W4,   rho_t_W4,   rho_tilde_W3,     rho_tilde_t_W3,
          S_tt_W3,   rho_tt_W3, lap_V_W3, lap_S_tilde_W3, lap_V_t_W1, S_ttt_L2, rho_ttt_L2,
          lap_S_tilde_t_L2, total, min_rho_tilde, member ? 1.0 : 0.0};
}

EnergyReport energy_norm(const HydroState &U, const TimeDerivatives &d, double nbar, double frak_C,
                         const HeisenbergCalculus &calc) {
  const double sb = std::sqrt(nbar);
  EnergyReport e;
  e.t = U.t;
  e.S_W5 = w_sq(U.S, 5, calc);
  e.rho_W5 = w_sq(shifted(U.rho, -sb), 5, calc);
  e.S_t_W4 = w_sq(U.S_t, 4, calc);
  e.rho_t_W4 = w_sq(U.rho_t, 4, calc);
  e.rho_tilde_W3 = w_sq(shifted(U.rho_tilde, -sb), 3, calc);
  e.rho_tilde_t_W3 = w_sq(d.rho_tilde_t, 3, calc);
  e.S_tt_W3 = w_sq(U.S_tt, 3, calc);
  e.rho_tt_W3 = w_sq(U.rho_tt, 3, calc);
  e.lap_V_W3 = w_sq(U.lap_V, 3, calc);
  e.lap_S_tilde_W3 = w_sq(U.lap_S_tilde, 3, calc);
  e.lap_V_t_W1 = w_sq(d.lap_V_t, 1, calc);
  e.S_ttt_L2 = sq(l2_norm(d.S_ttt));
  e.rho_ttt_L2 = sq(l2_norm(d.rho_ttt));
  e.lap_S_tilde_t_L2 = sq(l2_norm(d.lap_S_tilde_t));
  e.total = e.S_W5 + e.rho_W5 + e.S_t_W4 + e.rho_t_W4 + e.rho_tilde_W3 + e.rho_tilde_t_W3 + e.S_tt_W3 + e.rho_tt_W3 +
            e.lap_V_W3 + e.lap_S_tilde_W3 + e.lap_V_t_W1 + e.S_ttt_L2 + e.rho_ttt_L2 + e.lap_S_tilde_t_L2;
  e.min_rho_tilde = min_value(U.rho_tilde);
  e.frak_C = frak_C;
  e.member = e.total <= frak_C;
  return e;
}

bool ContractionLog::geometric_decay() const {
  if (rows.size() < 4)
    return false;
  for (std::size_t i = rows.size() - 3; i < rows.size(); ++i)
    if (!(rows[i].ratio < 1.0))
      return false;
  return true;
}

EquivalenceReport equivalence_check(const Trajectory &traj, double tolerance, const HeisenbergCalculus &calc) {
  EquivalenceReport r;
  r.tolerance = tolerance;
  for (const HydroState &U : traj) {
    EquivalenceRow row;
    row.t = U.t;
    const ScalarField dr = U.rho_tilde - U.rho;
    const ScalarField dS = U.S_tilde - U.S;
    row.rho_defect_inf = max_abs(dr);
    row.S_defect_inf = max_abs(dS);
    row.lap_S_defect_L2 = l2_norm(calc.sub_laplacian(dS));
    r.max_rho = std::max(r.max_rho, row.rho_defect_inf);
    r.max_S = std::max(r.max_S, row.S_defect_inf);
    r.max_lap = std::max(r.max_lap, row.lap_S_defect_L2);
    r.rows.push_back(row);
  }
  r.pass = r.max_rho <= tolerance && r.max_S <= tolerance && r.max_lap <= tolerance;
  return r;
}

SourceBoundReport source_bound_check(const Trajectory &traj, const std::vector<Sources> &F, double M_star,
                                     const IterationConfig &cfg, const HeisenbergCalculus &calc) {
  SourceBoundReport r;
  r.M_star = M_star;
  r.M_eff = std::max(M_star, 1.0);
  r.slack = cfg.source_slack;
  double rmax = 0, rmin = std::numeric_limits<double>::infinity();
  std::vector<double> times;
  std::vector<const ScalarField *> f2, f3, f5;
  for (std::size_t m = 0; m < traj.size(); ++m) {
    rmax = std::max(rmax, max_value(traj[m].rho_tilde));
    rmin = std::min(rmin, min_value(traj[m].rho_tilde));
    times.push_back(traj[m].t);
    f2.push_back(&F[m].F2);
    f3.push_back(&F[m].F3);
    f5.push_back(&F[m].F5);
  }
  r.a0 = compute_a0(rmax, rmin, cfg);
  const auto d2 = differentiate(f2, times), d3 = differentiate(f3, times), d5 = differentiate(f5, times);
  const double C = cfg.C_const, M = r.M_eff, a0 = r.a0;
  const double rhs[5] = {C * M * M, C * (std::pow(M, 4) + std::pow(M, 6)),
                         C * a0 * (M * M + std::pow(M, 4) + std::pow(M, 6) + std::pow(M, 8) + std::pow(M, 10)),
                         C * a0 * std::pow(M, 3), C * M * M};
  for (std::size_t m = 0; m < traj.size(); ++m) {
    SourceBoundRow row;
    row.t = traj[m].t;
    row.lhs[0] = w_sq(F[m].F1, 3, calc);
    row.lhs[1] = w_sq(F[m].F2, 3, calc) + w_sq(d2[m], 3, calc);
    row.lhs[2] = w_sq(F[m].F3, 3, calc) + w_sq(d3[m], 3, calc);
    row.lhs[3] = w_sq(F[m].F4, 3, calc);
    row.lhs[4] = w_sq(F[m].F5, 3, calc) + w_sq(d5[m], 1, calc);
    for (int k = 0; k < 5; ++k) {
      row.rhs[k] = rhs[k];
      r.max_ratio[k] = std::max(r.max_ratio[k], row.lhs[k] / rhs[k]);
    }
    r.rows.push_back(row);
  }
  r.pass = true;
  for (double q : r.max_ratio)
    r.pass = r.pass && std::isfinite(q) && q <= r.slack;
  return r;
}

ReducedResidualReport reduced_residual_check(const Trajectory &traj, const IterationConfig &cfg,
                                             const HeisenbergCalculus &calc) {
  ReducedResidualReport r;
  // order 8 is the highest stencil; compare it against order 6 instead
  const int p_hi = calc.fd_order() < 8 ? calc.fd_order() + 2 : 6;
  const HeisenbergCalculus hi(calc.grid(), p_hi);
  const int shell = std::max(hi.shell(), calc.shell());
  auto demean = [](const ScalarField &u) { return shifted(u, -mean(u)); };
  for (const HydroState &U : traj) {
    madelung::ReducedState s{U.rho, U.rho_t, U.rho_tt, U.S, U.S_t, U.S_tt, U.V, cfg.nbar};
    const auto R = madelung::residual_reduced_system(s, calc);
    const auto H = madelung::residual_reduced_system(s, hi);
    r.wave_rho = std::max(r.wave_rho, l2_norm_interior(R.wave_rho, shell));
    r.wave_S = std::max(r.wave_S, l2_norm_interior(R.wave_S, shell));
    r.poisson = std::max(r.poisson, l2_norm_interior(demean(R.poisson), shell));
    r.wave_rho_hi = std::max(r.wave_rho_hi, l2_norm_interior(H.wave_rho, shell));
    r.wave_S_hi = std::max(r.wave_S_hi, l2_norm_interior(H.wave_S, shell));
    r.poisson_hi = std::max(r.poisson_hi, l2_norm_interior(demean(H.poisson), shell));
    r.budget_rho = std::max(r.budget_rho, 2 * l2_norm_interior(R.wave_rho - H.wave_rho, shell));
    r.budget_S = std::max(r.budget_S, 2 * l2_norm_interior(R.wave_S - H.wave_S, shell));
    r.budget_poisson = std::max(r.budget_poisson, 2 * l2_norm_interior(demean(R.poisson - H.poisson), shell));
  }
  r.floor = 10 * cfg.tol_low;
  r.pass = r.wave_rho <= std::max(r.floor, r.budget_rho) && r.wave_S <= std::max(r.floor, r.budget_S) &&
           r.poisson <= std::max(r.floor, r.budget_poisson);
  return r;
}

PicardSolver::PicardSolver(const GroupFourier &gf, const HeisenbergCalculus &calc, IterationConfig cfg)
    : m_gf(gf), m_calc(calc), m_cfg(cfg) {
  if (!(gf.grid() == calc.grid()))
    throw PreconditionError("PicardSolver: transform and calculus grids differ");
  m_cfg.validate();
}

ScalarField PicardSolver::dev_rho(const ScalarField &rho) const { return shifted(rho, -std::sqrt(m_cfg.nbar)); }

namespace {

ScalarField project(const ScalarField &u, const GroupFourier &gf) { return gf.inverse_real(gf.forward(u)); }

// sign * L u = g with the zero mode dropped and the far-field shell shifted to zero;
// also returns L u itself.
std::pair<ScalarField, ScalarField> elliptic(const SpectralCoeffs &g, int sign, const GroupFourier &gf, int shell) {
  SpectralCoeffs u = linear::solve_poisson_coeffs(g, sign, gf);
  ScalarField uf = gf.inverse_real(u);
  uf += -shell_mean(uf, shell);
  ScalarField lap = gf.inverse_real(gf.multiply(u, [](double a2) { return -a2; }));
  return {std::move(uf), std::move(lap)};
}

} // namespace

HydroState PicardSolver::init_state(const InitialData &d) const {
  const Grid3 &g = m_calc.grid();
  for (const ScalarField *f : {&d.n0, &d.n1, &d.S0, &d.S1})
    if (!(f->grid() == g))
      throw PreconditionError("init_state: initial data grid does not match the solver grid");
  for (std::size_t p = 0; p < d.n0.size(); ++p)
    if (!(d.n0[p] >= m_cfg.delta))
      vacuum_at(d.n0, p, 0.0, "init_state: n0 below delta:");
  const double sb = std::sqrt(m_cfg.nbar);
  HydroState U;
  U.t = 0.0;
  const ScalarField rho0 = map(d.n0, [](double v) { return std::sqrt(v); });
  ScalarField rho1(g);
  for (std::size_t p = 0; p < g.size(); ++p)
    rho1[p] = d.n1[p] / (2 * rho0[p]);
  U.rho = shifted(project(shifted(rho0, -sb), m_gf), sb);
  U.rho_t = project(rho1, m_gf);
  U.S = project(d.S0, m_gf);
  U.S_t = project(d.S1, m_gf);
  U.rho_tilde = U.rho;
  const int shell = m_calc.shell();

  // V first: F2 needs it
  U.S_tt = ScalarField(g);
  U.V = ScalarField(g);
  Sources F = compute_sources(U, m_cfg, m_calc);
  {
    auto [V, lapV] = elliptic(m_gf.forward(F.F5), -1, m_gf, shell);
    U.V = std::move(V);
    U.lap_V = std::move(lapV);
  }
  F = compute_sources(U, m_cfg, m_calc);
  const auto lap = [](double a2) { return -a2; };
  SpectralCoeffs cr = m_gf.multiply(m_gf.forward(dev_rho(U.rho)), lap);
  cr += m_gf.forward(F.F2);
  U.rho_tt = m_gf.inverse_real(cr);
  SpectralCoeffs cs = m_gf.multiply(m_gf.forward(U.S), lap);
  cs += m_gf.forward(F.F3);
  U.S_tt = m_gf.inverse_real(cs);
  F = compute_sources(U, m_cfg, m_calc);
  auto [St, lapSt] = elliptic(m_gf.forward(F.F4), 1, m_gf, shell);
  U.S_tilde = std::move(St);
  U.lap_S_tilde = std::move(lapSt);
  return U;
}

Trajectory PicardSolver::base_trajectory(const HydroState &U0, const std::vector<double> &times) const {
  Trajectory tr;
  tr.reserve(times.size());
  const int shell = m_calc.shell();
  for (double t : times) {
    tr.push_back(U0);
    HydroState &U = tr.back();
    U.t = t;
    if (!m_cfg.taylor_base || t == 0.0)
      continue;
    const double h = 0.5 * t * t;
    for (std::size_t p = 0; p < U.rho.size(); ++p) {
      U.rho[p] = U0.rho[p] + t * U0.rho_t[p] + h * U0.rho_tt[p];
      U.rho_t[p] = U0.rho_t[p] + t * U0.rho_tt[p];
      U.S[p] = U0.S[p] + t * U0.S_t[p] + h * U0.S_tt[p];
      U.S_t[p] = U0.S_t[p] + t * U0.S_tt[p];
    }
    U.rho_tilde = U.rho;
    const Sources F = compute_sources(U, m_cfg, m_calc);
    auto [V, lapV] = elliptic(m_gf.forward(F.F5), -1, m_gf, shell);
    U.V = std::move(V);
    U.lap_V = std::move(lapV);
    auto [St, lapSt] = elliptic(m_gf.forward(F.F4), 1, m_gf, shell);
    U.S_tilde = std::move(St);
    U.lap_S_tilde = std::move(lapSt);
  }
  return tr;
}

Trajectory PicardSolver::picard_step(const Trajectory &Uj, std::vector<Sources> *sources_out) const {
  const std::size_t n = Uj.size();
  if (n < 2)
    throw PreconditionError("picard_step: trajectory needs at least two levels");
  const int shell = m_calc.shell();
  const double sb = std::sqrt(m_cfg.nbar);
  const auto lap = [](double a2) { return -a2; };

  std::vector<double> times(n);
  std::vector<Sources> F(n);
  std::vector<SpectralCoeffs> f2(n), f3(n);
  for (std::size_t m = 0; m < n; ++m) {
    times[m] = Uj[m].t;
    F[m] = compute_sources(Uj[m], m_cfg, m_calc);
    f2[m] = m_gf.forward(F[m].F2);
    f3[m] = m_gf.forward(F[m].F3);
  }

  Trajectory out(n);
  const HydroState &U0 = Uj.front();
  SpectralCoeffs cr = m_gf.forward(dev_rho(U0.rho)), crt = m_gf.forward(U0.rho_t);
  SpectralCoeffs cs = m_gf.forward(U0.S), cst = m_gf.forward(U0.S_t);
  for (std::size_t m = 0; m < n; ++m) {
    HydroState &U = out[m];
    U.t = times[m];
    if (m == 0) {
      U.rho = U0.rho;
      U.rho_t = U0.rho_t;
      U.S = U0.S;
      U.S_t = U0.S_t;
    } else {
      const std::vector<double> tt{times[m - 1], times[m]};
      SpectralCoeffs nr, nrt, ns, nst;
      linear::propagate_coeffs(m_gf, cr, crt, {f2[m - 1], f2[m]}, tt, times[m], m_cfg.quadrature, nr, nrt);
      linear::propagate_coeffs(m_gf, cs, cst, {f3[m - 1], f3[m]}, tt, times[m], m_cfg.quadrature, ns, nst);
      cr = std::move(nr);
      crt = std::move(nrt);
      cs = std::move(ns);
      cst = std::move(nst);
      U.rho = shifted(m_gf.inverse_real(cr), sb);
      U.rho_t = m_gf.inverse_real(crt);
      U.S = m_gf.inverse_real(cs);
      U.S_t = m_gf.inverse_real(cst);
    }
    SpectralCoeffs rtt = m_gf.multiply(cr, lap);
    rtt += f2[m];
    U.rho_tt = m_gf.inverse_real(rtt);
    SpectralCoeffs stt = m_gf.multiply(cs, lap);
    stt += f3[m];
    U.S_tt = m_gf.inverse_real(stt);
    auto [St, lapSt] = elliptic(m_gf.forward(F[m].F4), 1, m_gf, shell);
    U.S_tilde = std::move(St);
    U.lap_S_tilde = std::move(lapSt);
    auto [V, lapV] = elliptic(m_gf.forward(F[m].F5), -1, m_gf, shell);
    U.V = std::move(V);
    U.lap_V = std::move(lapV);
  }

  std::vector<const ScalarField *> F1p(n), Lp(n);
  for (std::size_t m = 0; m < n; ++m) {
    F1p[m] = &F[m].F1;
    Lp[m] = &Uj[m].lap_S_tilde;
  }
  auto rt = integrate_rho_tilde(U0.rho_tilde, times, F1p, Lp);
  for (std::size_t m = 0; m < n; ++m)
    out[m].rho_tilde = std::move(rt[m]);
  if (sources_out)
    *sources_out = std::move(F);
  return out;
}

LowNorm PicardSolver::low_norm(const Trajectory &a, const Trajectory &b) const {
  LowNorm r;
  double sup = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double n1 = geom::sobolev_norm(a[m].rho - b[m].rho, 1, m_calc);
    const double n2 = l2_norm(a[m].rho_t - b[m].rho_t);
    const double n3 = geom::sobolev_norm(a[m].S - b[m].S, 1, m_calc);
    const double n4 = l2_norm(a[m].S_t - b[m].S_t);
    const double n5 = l2_norm(a[m].rho_tilde - b[m].rho_tilde);
    r.rho_W1 = std::max(r.rho_W1, n1);
    r.rho_t_L2 = std::max(r.rho_t_L2, n2);
    r.S_W1 = std::max(r.S_W1, n3);
    r.S_t_L2 = std::max(r.S_t_L2, n4);
    r.rho_tilde_L2 = std::max(r.rho_tilde_L2, n5);
    sup = std::max(sup, n1 * n1 + n2 * n2 + n3 * n3 + n4 * n4 + n5 * n5);
  }
  r.total = std::sqrt(sup);
  return r;
}

std::vector<TimeDerivatives> PicardSolver::time_derivatives(const Trajectory &traj) const {
  std::vector<double> t;
  std::vector<const ScalarField *> rt, stt, rtt, ls, lv;
  for (const HydroState &U : traj) {
    t.push_back(U.t);
    rt.push_back(&U.rho_tilde);
    stt.push_back(&U.S_tt);
    rtt.push_back(&U.rho_tt);
    ls.push_back(&U.lap_S_tilde);
    lv.push_back(&U.lap_V);
  }
  auto d_rt = differentiate(rt, t), d_stt = differentiate(stt, t), d_rtt = differentiate(rtt, t);
  auto d_ls = differentiate(ls, t), d_lv = differentiate(lv, t);
  std::vector<TimeDerivatives> out(traj.size());
  for (std::size_t m = 0; m < traj.size(); ++m)
    out[m] = {std::move(d_rt[m]), std::move(d_stt[m]), std::move(d_rtt[m]), std::move(d_ls[m]), std::move(d_lv[m])};
  return out;
}

RunResult PicardSolver::run(const InitialData &d, const RunOptions &opts) const {
  RunResult res;
  res.positivity_floor = floor_of(m_cfg);
  res.inherited_floor = 0.25 * std::sqrt(std::max(0.0, min_value(d.n0)));
  HydroState U0;
  try {
    U0 = init_state(d);
  } catch (const VacuumError &e) {
    res.status = RunStatus::Vacuum;
    res.message = e.what();
    res.vac_t = e.t(), res.vac_x = e.x(), res.vac_y = e.y(), res.vac_tau = e.tau(), res.vac_value = e.value();
    return res;
  }
  res.M_star = compute_M_star(d, m_cfg, m_calc);
  res.M_star_absolute = compute_M_star_absolute(d, m_cfg, m_calc);
  res.T0 = compute_T0(res.M_star, m_cfg);
  res.T = m_cfg.use_paper_T0 ? std::min(res.T0, m_cfg.T_final) : m_cfg.T_final;
  const int steps = std::max(1, int(std::ceil(res.T / m_cfg.dt - 1e-9)));
  res.dt = res.T / steps;
  std::vector<double> times(steps + 1);
  for (int m = 0; m <= steps; ++m)
    times[m] = m == steps ? res.T : m * res.dt;
  res.a0 = compute_a0(max_value(U0.rho_tilde), res.positivity_floor, m_cfg);
  res.frak_C = compute_frak_C(res.M_star, res.a0, m_cfg);

  Trajectory traj = base_trajectory(U0, times);
  bool converged = false;
  try {
    for (int j = 1; j <= m_cfg.picard_max; ++j) {
      const auto t0 = std::chrono::steady_clock::now();
      Trajectory next = picard_step(traj);
      for (const HydroState &U : next)
        check_floor(U.rho_tilde, res.positivity_floor, U.t, "picard_step: rho~ below the vacuum floor:");
      ContractionRow row;
      row.j = j;
      row.norm = low_norm(next, traj);
      if (!res.log.rows.empty() && res.log.rows.back().norm.total > 0)
        row.ratio = row.norm.total / res.log.rows.back().norm.total;
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      res.log.rows.push_back(row);
      res.iterations = j;
      if (opts.on_iteration)
        opts.on_iteration(row);
      traj = std::move(next);
      if (!std::isfinite(row.norm.total))
        break;
      if (row.norm.total <= m_cfg.tol_low) {
        converged = true;
        break;
      }
    }
  } catch (const VacuumError &e) {
    res.status = RunStatus::Vacuum;
    res.message = e.what();
    res.vac_t = e.t(), res.vac_x = e.x(), res.vac_y = e.y(), res.vac_tau = e.tau(), res.vac_value = e.value();
    res.trajectory = std::move(traj);
    return res;
  }

  res.min_rho_tilde = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (const HydroState &U : traj) {
    res.min_rho_tilde = std::min(res.min_rho_tilde, min_value(U.rho_tilde));
    scale = std::max({scale, max_abs(U.rho), max_abs(U.S)});
  }
  if (!converged) {
    res.status = RunStatus::NonContraction;
    std::ostringstream os;
    os << "no convergence after " << res.iterations << " Picard iterations; last low norm "
       << (res.log.rows.empty() ? 0.0 : res.log.rows.back().norm.total);
    res.message = os.str();
    res.trajectory = std::move(traj);
    return res;
  }
  res.message = "converged";

  res.sources.reserve(traj.size());
  for (const HydroState &U : traj) {
    res.sources.push_back(compute_sources(U, m_cfg, m_calc));
    res.max_source_identity = std::max(res.max_source_identity, source_identity_defect(U, res.sources.back()));
  }
  if (opts.energy) {
    const auto dts = time_derivatives(traj);
    for (std::size_t m = 0; m < traj.size(); ++m) {
      res.energy.push_back(energy_norm(traj[m], dts[m], m_cfg.nbar, res.frak_C, m_calc));
      res.membership = res.membership && res.energy.back().member;
    }
  }
  const double tol = m_cfg.equivalence_tol > 0 ? m_cfg.equivalence_tol : 10 * m_cfg.tol_low * scale;
  res.equivalence = equivalence_check(traj, tol, m_calc);
  if (opts.source_bounds)
    res.source_bounds = source_bound_check(traj, res.sources, res.M_star, m_cfg, m_calc);
  if (opts.reduced_residuals)
    res.reduced = reduced_residual_check(traj, m_cfg, m_calc);
  res.trajectory = std::move(traj);
  return res;
}

} // namespace hrqhd::solver
