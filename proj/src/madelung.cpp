#include "hrqhd/madelung.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/poisson.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hrqhd::madelung {

using geom::HeisenbergCalculus;

Scaling nondimensionalize(const PhysicalParams &p) {
  if (!(p.mass > 0 && p.c > 0 && p.hbar > 0 && p.L > 0 && p.T > 0))
    throw ConfigError("nondimensionalize: physical parameters must be positive");
  const double U = p.L / p.T;
  return {p.hbar / (p.mass * U * U * p.T), U / p.c};
}

geom::GroupPoint dilation_map(const geom::GroupPoint &p, double L) { return geom::dilate(p, L); }

namespace {

[[noreturn]] void vacuum_at(const Grid3 &g, std::size_t n, double value, const char *where) {
  const int k = int(n % g.ntau);
  const int j = int((n / g.ntau) % g.ny);
  const int i = int(n / (std::size_t(g.ntau) * g.ny));
  std::ostringstream os;
  os << where << ": density " << value << " at (" << g.x(i) << ", " << g.y(j) << ", " << g.tau(k) << ")";
  throw VacuumError(os.str(), 0.0, g.x(i), g.y(j), g.tau(k), value);
}

void require_positive(const ScalarField &n, double threshold, const char *where) {
  for (std::size_t p = 0; p < n.size(); ++p)
    if (!(n[p] > threshold))
      vacuum_at(n.grid(), p, n[p], where);
}

ScalarField dot(const HorizontalField &F, const HorizontalField &G) { return F.a * G.a + F.b * G.b; }

// First x or y derivative of the phase from local phase differences.
ScalarField phase_derivative_xy(const ComplexField &Phi, const geom::Stencil1D &st, bool along_x, double eps) {
  const Grid3 &g = Phi.grid();
  ScalarField out(g);
  const int w = st.width();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const int row = along_x ? i : j;
      const double *wt = st.weights(row);
      const int s = st.start(row);
      for (int k = 0; k < g.ntau; ++k) {
        const cplx c = std::conj(Phi.at(i, j, k));
        double acc = 0.0;
        for (int q = 0; q < w; ++q) {
          const cplx other = along_x ? Phi.at(s + q, j, k) : Phi.at(i, s + q, k);
          acc += wt[q] * std::arg(c * other);
        }
        out.at(i, j, k) = eps * acc;
      }
    }
  return out;
}

// eps times the tau-unwrapped phase, one line at a time.
ScalarField unwrapped_phase(const ComplexField &Phi, double eps) {
  const Grid3 &g = Phi.grid();
  ScalarField out(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double acc = std::arg(Phi.at(i, j, 0));
      double winding = 0.0;
      for (int k = 0; k < g.ntau; ++k) {
        out.at(i, j, k) = eps * acc;
        const int kn = (k + 1) % g.ntau;
        const double d = std::arg(std::conj(Phi.at(i, j, k)) * Phi.at(i, j, kn));
        acc += d;
        winding += d;
      }
      if (std::abs(winding) > std::numbers::pi) {
        std::ostringstream os;
        os << "kgp_to_hydro: phase winds " << winding / (2 * std::numbers::pi) << " times along tau at (" << g.x(i)
           << ", " << g.y(j) << ")";
        throw PreconditionError(os.str());
      }
    }
  return out;
}

} // namespace

KGPState hydro_to_kgp(const HydroFields &h, double epsilon, double vacuum_threshold) {
  if (!(epsilon > 0))
    throw ConfigError("hydro_to_kgp: epsilon must be positive");
  const Grid3 &g = h.n.grid();
  require_positive(h.n, std::max(vacuum_threshold, 0.0), "hydro_to_kgp");
  KGPState k;
  k.Phi = ComplexField(g);
  k.Phi_t = ComplexField(g);
  k.V = h.V;
  k.epsilon = epsilon;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double r = std::sqrt(h.n[p]);
    const double th = h.S[p] / epsilon;
    const cplx e(std::cos(th), std::sin(th));
    k.Phi[p] = r * e;
    k.Phi_t[p] = e * cplx(h.n_t[p] / (2.0 * r), r * h.S_t[p] / epsilon);
  }
  return k;
}

HydroRecovery kgp_to_hydro(const KGPState &k, const spectral::GroupFourier &gf, const HeisenbergCalculus &calc,
                           const RecoveryOptions &opts) {
  const Grid3 &g = k.Phi.grid();
  const double eps = k.epsilon;
  HydroRecovery r;
  HydroFields &h = r.h;
  h.n = ScalarField(g);
  h.n_t = ScalarField(g);
  h.S_t = ScalarField(g);
  h.V = k.V;
  for (std::size_t p = 0; p < g.size(); ++p)
    h.n[p] = std::norm(k.Phi[p]);
  require_positive(h.n, opts.vacuum_fraction * opts.nbar, "kgp_to_hydro");
  for (std::size_t p = 0; p < g.size(); ++p) {
    const cplx z = std::conj(k.Phi[p]) * k.Phi_t[p];
    h.n_t[p] = 2.0 * z.real();
    h.S_t[p] = eps * z.imag() / h.n[p];
  }

  if (opts.form == MomentumForm::Direct) {
    const ComplexField XP = calc.X(k.Phi), YP = calc.Y(k.Phi);
    r.grad_S = {ScalarField(g), ScalarField(g)};
    for (std::size_t p = 0; p < g.size(); ++p) {
      const cplx c = std::conj(k.Phi[p]);
      r.grad_S.a[p] = eps * (c * XP[p]).imag() / h.n[p];
      r.grad_S.b[p] = eps * (c * YP[p]).imag() / h.n[p];
    }
  } else {
    const ScalarField Sx = phase_derivative_xy(k.Phi, calc.stencil_x(), true, eps);
    const ScalarField Sy = phase_derivative_xy(k.Phi, calc.stencil_y(), false, eps);
    const ScalarField St = calc.dtau(unwrapped_phase(k.Phi, eps));
    r.grad_S = {ScalarField(g), ScalarField(g)};
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int kk = 0; kk < g.ntau; ++kk) {
          const std::size_t p = g.index(i, j, kk);
          r.grad_S.a[p] = Sx[p] - 0.5 * g.y(j) * St[p];
          r.grad_S.b[p] = Sy[p] + 0.5 * g.x(i) * St[p];
        }
  }

  linear::PoissonOptions po;
  po.project_mean = true;
  po.gauge = linear::Gauge::FarField;
  po.shell = calc.shell();
  auto sol = linear::solve_poisson(calc.divergence(r.grad_S), 1, gf, po);
  h.S = std::move(sol.u);
  r.dropped_mean = sol.dropped_mean;
  return r;
}

ScalarField residual_continuity(const HydroFields &h, const ScalarField &S_tt, double upsilon,
                                const HeisenbergCalculus &calc) {
  const HorizontalField gS = calc.gradient(h.S);
  const ScalarField flux = calc.divergence({h.n * gS.a, h.n * gS.b});
  // n_t + div(n grad S) - ups^2 (n_t S_t + n S_tt)
  ScalarField r = h.n_t + flux;
  const double u2 = upsilon * upsilon;
  for (std::size_t p = 0; p < r.size(); ++p)
    r[p] -= u2 * (h.n_t[p] * h.S_t[p] + h.n[p] * S_tt[p]);
  return r;
}

ScalarField residual_hamilton_jacobi(const HydroFields &h, const ScalarField &n_tt, double epsilon, double upsilon,
                                     const HeisenbergCalculus &calc) {
  require_positive(h.n, 0.0, "residual_hamilton_jacobi");
  const ScalarField sq = map(h.n, [](double v) { return std::sqrt(v); });
  const ScalarField lap_sq = calc.sub_laplacian(sq);
  const HorizontalField gS = calc.gradient(h.S);
  const double e2 = epsilon * epsilon, u2 = upsilon * upsilon;
  ScalarField r(h.n.grid());
  for (std::size_t p = 0; p < r.size(); ++p) {
    const double s = sq[p];
    const double g2 = gS.a[p] * gS.a[p] + gS.b[p] * gS.b[p];
    const double sq_tt = n_tt[p] / (2 * s) - h.n_t[p] * h.n_t[p] / (4 * h.n[p] * s);
    const double lhs = 0.5 * e2 * (lap_sq[p] / s - g2 / e2);
    const double rhs = h.S_t[p] + h.V[p] + 0.5 * e2 * u2 * sq_tt / s - 0.5 * u2 * h.S_t[p] * h.S_t[p];
    r[p] = lhs - rhs;
  }
  return r;
}

namespace {

// div(n u (x) u) component-wise: sum_j X_j(n u_j u_i).
HorizontalField convective(const ScalarField &n, const HorizontalField &u, const HeisenbergCalculus &calc) {
  const ScalarField nab = n * u.a * u.b;
  return {calc.X(n * u.a * u.a) + calc.Y(nab), calc.X(nab) + calc.Y(n * u.b * u.b)};
}

} // namespace

HorizontalField residual_momentum(const HydroFields &h, const SecondDerivatives &d, double epsilon, double upsilon,
                                  const HeisenbergCalculus &calc) {
  require_positive(h.n, 0.0, "residual_momentum");
  const Grid3 &g = h.n.grid();
  const double e2 = epsilon * epsilon, u2 = upsilon * upsilon;
  const HorizontalField u = calc.gradient(h.S);
  const HorizontalField u_t = calc.gradient(h.S_t);
  const ScalarField St = calc.dtau(h.S);
  const ScalarField sq = map(h.n, [](double v) { return std::sqrt(v); });
  const ScalarField Q = calc.sub_laplacian(sq) * [&] {
    ScalarField inv(g);
    for (std::size_t p = 0; p < g.size(); ++p)
      inv[p] = 1.0 / sq[p];
    return inv;
  }();
  const HorizontalField gQ = calc.gradient(Q);
  const HorizontalField gV = calc.gradient(h.V);
  const HorizontalField conv = convective(h.n, u, calc);
  const HorizontalField Ju = geom::apply_J(u);

  // q = n_t / n and its time derivative
  ScalarField q(g), q_t(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    q[p] = h.n_t[p] / h.n[p];
    q_t[p] = d.n_tt[p] / h.n[p] - q[p] * q[p];
  }
  const HorizontalField gq = calc.gradient(q), gq_t = calc.gradient(q_t);

  HorizontalField r{ScalarField(g), ScalarField(g)};
  auto component = [&](const ScalarField &ui, const ScalarField &uti, const ScalarField &convi, const ScalarField &Ji,
                       const ScalarField &gQi, const ScalarField &gVi, const ScalarField &gqi, const ScalarField &gq_ti,
                       ScalarField &out) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double n = h.n[p], nt = h.n_t[p];
      const double lhs = nt * ui[p] + n * uti[p] + convi[p] + n * Ji[p] * St[p] - 0.5 * e2 * n * gQi[p] + n * gVi[p];
      const double d_flux = d.S_tt[p] * n * ui[p] + h.S_t[p] * nt * ui[p] + h.S_t[p] * n * uti[p];
      const double d_quant = nt * gqi[p] + n * gq_ti[p];
      const double rhs = 0.5 * u2 * (2.0 * d_flux - 0.5 * e2 * d_quant);
      out[p] = lhs - rhs;
    }
  };
  component(u.a, u_t.a, conv.a, Ju.a, gQ.a, gV.a, gq.a, gq_t.a, r.a);
  component(u.b, u_t.b, conv.b, Ju.b, gQ.b, gV.b, gq.b, gq_t.b, r.b);
  return r;
}

std::pair<HorizontalField, HorizontalField> convective_identity_sides(const ScalarField &n, const ScalarField &S,
                                                                const HeisenbergCalculus &calc) {
  const HorizontalField u = calc.gradient(S);
  const ScalarField u2 = dot(u, u);
  const HorizontalField gu2 = calc.gradient(u2);
  HorizontalField lhs{0.5 * (n * gu2.a), 0.5 * (n * gu2.b)};
  const HorizontalField conv = convective(n, u, calc);
  const ScalarField dflux = calc.divergence({n * u.a, n * u.b});
  const ScalarField St = calc.dtau(S);
  const HorizontalField Ju = geom::apply_J(u);
  HorizontalField rhs{conv.a - dflux * u.a + n * Ju.a * St, conv.b - dflux * u.b + n * Ju.b * St};
  return {std::move(lhs), std::move(rhs)};
}

double convective_identity_defect(const ScalarField &n, const ScalarField &S, const HeisenbergCalculus &calc) {
  auto [lhs, rhs] = convective_identity_sides(n, S, calc);
  const double da = l2_norm_interior(lhs.a - rhs.a, calc.shell());
  const double db = l2_norm_interior(lhs.b - rhs.b, calc.shell());
  return std::hypot(da, db);
}

ReducedResiduals residual_reduced_system(const ReducedState &s, const HeisenbergCalculus &calc) {
  const Grid3 &g = s.rho.grid();
  const HorizontalField gr = calc.gradient(s.rho), gS = calc.gradient(s.S);
  const ScalarField Lr = calc.sub_laplacian(s.rho), LS = calc.sub_laplacian(s.S), LV = calc.sub_laplacian(s.V);
  ReducedResiduals r{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double rho = s.rho[p], St = s.S_t[p];
    const double g2 = gS.a[p] * gS.a[p] + gS.b[p] * gS.b[p];
    const double cross = gr.a[p] * gS.a[p] + gr.b[p] * gS.b[p];
    r.wave_rho[p] = s.rho_tt[p] - Lr[p] - rho * (St * St - 2 * St - g2 - 2 * s.V[p]);
    r.wave_S[p] = rho * (s.S_tt[p] - LS[p]) - 2 * (s.rho_t[p] + cross - s.rho_t[p] * St);
    r.poisson[p] = -LV[p] - (rho * rho - s.nbar);
  }
  return r;
}

} // namespace hrqhd::madelung
