#include "hrqhd/verify.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/group.hpp"
#include "hrqhd/group_fourier.hpp"
#include "hrqhd/madelung.hpp"
#include "hrqhd/operators.hpp"
#include "hrqhd/solver.hpp"
#include "hrqhd/wave.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace hrqhd::verify {

using geom::GroupPoint;
using geom::HeisenbergCalculus;
using spectral::GroupFourier;

bool SuiteReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow &r) { return r.pass; });
}

std::string SuiteReport::table() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-52s %14s %4s %12s  %s\n", "check", "measured", "", "threshold", "result");
  os << buf;
  for (const CheckRow &r : rows) {
    const char *rel = r.relation == Relation::AtMost ? "<=" : r.relation == Relation::AtLeast ? ">=" : "";
    if (r.relation == Relation::Info)
      std::snprintf(buf, sizeof buf, "%-52s %14.6e %4s %12s  %s\n", r.name.c_str(), r.value, "", "", "info");
    else
      std::snprintf(buf, sizeof buf, "%-52s %14.6e %4s %12.3e  %s\n", r.name.c_str(), r.value, rel, r.threshold,
                    r.pass ? "PASS" : "FAIL");
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "suite %s: %s (%.1f s)\n", suite.c_str(), pass() ? "PASS" : "FAIL", seconds);
  os << buf;
  return os.str();
}

namespace {

struct Suite {
  SuiteReport report;
  void at_most(const std::string &name, double v, double thr) {
    report.rows.push_back({name, v, thr, Relation::AtMost, v <= thr});
  }
  void at_least(const std::string &name, double v, double thr) {
    report.rows.push_back({name, v, thr, Relation::AtLeast, v >= thr});
  }
  void info(const std::string &name, double v) { report.rows.push_back({name, v, 0.0, Relation::Info, true}); }
};

double gauss(double x, double y, double tau, double w = 1.0, double wt = 1.0) {
  return std::exp(-(x * x + y * y) / (w * w) - tau * tau / (wt * wt));
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

// ---------------------------------------------------------------- geometry

void geometry(Suite &s) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  auto point = [&] { return GroupPoint{U(rng), U(rng), U(rng)}; };
  double assoc = 0, inv = 0, dil = 0;
  for (int n = 0; n < 2000; ++n) {
    const GroupPoint p = point(), q = point(), r = point();
    const GroupPoint a = geom::group_mul(geom::group_mul(p, q), r), b = geom::group_mul(p, geom::group_mul(q, r));
    assoc = std::max({assoc, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.tau - b.tau)});
    for (const GroupPoint &e : {geom::group_mul(p, geom::group_inv(p)), geom::group_mul(geom::group_inv(p), p)})
      inv = std::max({inv, std::abs(e.x), std::abs(e.y), std::abs(e.tau)});
    for (double L : {0.5, 2.0, 10.0}) {
      const double Np = geom::homogeneous_norm(p);
      dil = std::max(dil, std::abs(geom::homogeneous_norm(geom::dilate(p, L)) - L * Np) / (1 + L * Np));
    }
  }
  s.at_most("associativity, max component error", assoc, 1e-12);
  s.at_most("inverse, max component of p p^-1", inv, 1e-12);
  s.at_most("dilation homogeneity, L in {0.5, 2, 10}", dil, 1e-12);

  // commutator defect under dyadic refinement in x, y (tau is spectral)
  std::vector<double> defects;
  for (int n : {16, 32, 64, 128}) {
    const Grid3 g(n, n, 32, 6.0, 6.0, 6.0);
    const ScalarField u = ScalarField::from_function(g, [](double x, double y, double t) {
      return (1 + 0.5 * x - 0.25 * y * t) * gauss(x - 0.3, y + 0.2, t, 1.2, 1.5);
    });
    defects.push_back(geom::commutator_defect(u, 4));
  }
  for (std::size_t k = 0; k + 1 < defects.size(); ++k) {
    char name[96];
    std::snprintf(name, sizeof name, "commutator defect order, h/%d -> h/%d", 1 << k, 2 << k);
    s.at_least(name, observed_order(defects[k], defects[k + 1]), 2.0);
  }
  s.info("commutator defect at the finest grid", defects.back());

  const Grid3 g(32, 32, 32, 6.0, 6.0, 6.0);
  const HeisenbergCalculus &calc = geom::calculus_for(g, 4);
  const ScalarField u = ScalarField::from_function(g, [](double x, double y, double t) { return gauss(x, y, t); });
  const ScalarField Lu = calc.sub_laplacian(u);
  s.at_most("div(grad u) - L u, relative max", max_abs(calc.divergence(calc.gradient(u)) - Lu) / max_abs(Lu), 1e-13);
  const ScalarField one(g, 1.0);
  s.at_most("commutator defect of u = 1", geom::commutator_defect(one, 4), 1e-12);
  const HorizontalField F = calc.gradient(u);
  const HorizontalField JJ = geom::apply_J(geom::apply_J(F));
  s.at_most("J(J(F)) + F, max", std::max(max_abs(JJ.a + F.a), max_abs(JJ.b + F.b)), 0.0);
}

// ---------------------------------------------------------------- spectrum

void spectrum(Suite &s) {
  const int N = 48;
  for (double lam : {0.5, 1.0, 2.0}) {
    const spectral::TwistedEigenbasis b = spectral::build_eigenbasis(lam, N);
    const auto &ev = b.eigenvalues();
    // the n-th degenerate level against (2n + 1)|lambda|
    const auto lv = spectral::degenerate_levels(ev);
    double worst = lv.size() < std::size_t(N / 2) ? std::numeric_limits<double>::infinity() : 0.0;
    for (int n = 0; n < N / 2 && n < int(lv.size()); ++n)
      worst = std::max(worst, std::abs(lv[n] - (2 * n + 1) * lam) / ((2 * n + 1) * lam));
    char name[96];
    std::snprintf(name, sizeof name, "|lambda| = %.1f: level n vs (2n+1)|lambda|, n < N/2", lam);
    s.at_most(name, worst, 1e-6);
    std::snprintf(name, sizeof name, "|lambda| = %.1f: orthogonality defect", lam);
    s.at_most(name, b.orthogonality_defect(), 1e-10);
    std::snprintf(name, sizeof name, "|lambda| = %.1f: lowest eigenvalue / |lambda| - 1", lam);
    s.at_most(name, std::abs(ev.front() / lam - 1), 1e-8);
  }
  const auto p = spectral::build_eigenbasis(1.0, 16), m = spectral::build_eigenbasis(-1.0, 16);
  double sym = 0;
  for (std::size_t k = 0; k < p.eigenvalues().size(); ++k)
    sym = std::max(sym, std::abs(p.eigenvalues()[k] - m.eigenvalues()[k]));
  s.at_most("spectrum(lambda = -1) vs spectrum(lambda = 1)", sym, 1e-12);
  // a frame scale off the natural one: convergence in N of the lowest levels
  const double sc = 0.8 * spectral::natural_scale(1.0);
  double e16 = 0, e32 = 0;
  for (int n = 0; n < 4; ++n) {
    const double ref = 2 * n + 1;
    auto err = [&](const spectral::TwistedEigenbasis &b) {
      double best = std::numeric_limits<double>::infinity();
      for (double mu : b.eigenvalues())
        best = std::min(best, std::abs(mu - ref) / ref);
      return best;
    };
    e16 = std::max(e16, err(spectral::build_eigenbasis(1.0, 16, sc)));
    e32 = std::max(e32, err(spectral::build_eigenbasis(1.0, 32, sc)));
  }
  s.info("off-natural scale, n < 4, N = 16 rel error", e16);
  s.at_most("off-natural scale, n < 4, N = 32 rel error", e32, e16);
}

// ---------------------------------------------------------------- plancherel

std::vector<std::pair<std::string, std::function<double(double, double, double)>>> smooth_suite() {
  return {
      {"gaussian", [](double x, double y, double t) { return gauss(x, y, t); }},
      {"shifted gaussian", [](double x, double y, double t) { return gauss(x - 0.8, y + 0.5, t - 0.4, 1.1, 1.3); }},
      {"xy gaussian", [](double x, double y, double t) { return x * y * gauss(x, y, t, 1.2, 1.0); }},
      {"tau-modulated", [](double x, double y, double t) { return std::cos(1.5 * t) * gauss(x, y, t, 1.0, 1.6); }},
      {"anisotropic", [](double x, double y, double t) {
         return std::exp(-0.7 * x * x - 1.3 * y * y + 0.3 * x * y - 0.5 * t * t) * (1 + 0.2 * x);
       }},
  };
}

void plancherel(Suite &s) {
  const Grid3 g(64, 64, 64, 8.0, 8.0, 8.0);
  const GroupFourier gf(g, 32);
  double worst_rt = 0, worst_pl = 0, worst_imag = 0;
  std::vector<ScalarField> fields;
  for (const auto &[name, f] : smooth_suite()) {
    const ScalarField u = ScalarField::from_function(g, f);
    const auto c = gf.forward(u);
    const double rt = l2_norm(gf.inverse_real(c) - u) / l2_norm(u);
    const double pl = spectral::plancherel_defect(u, gf);
    const ComplexField z = gf.inverse(c);
    double im = 0;
    for (std::size_t n = 0; n < z.size(); ++n)
      im = std::max(im, std::abs(z[n].imag()));
    s.at_most("round trip rel L2, " + name, rt, 1e-6);
    s.at_most("Plancherel defect, " + name, pl, 1e-6);
    worst_rt = std::max(worst_rt, rt);
    worst_pl = std::max(worst_pl, pl);
    worst_imag = std::max(worst_imag, im / max_abs(u));
    fields.push_back(u);
  }
  s.at_most("inverse imaginary part / max|u|", worst_imag, 1e-10);
  // linearity
  const double al = 0.7, be = -1.9;
  const auto ca = gf.forward(fields[0]), cb = gf.forward(fields[1]);
  const auto cab = gf.forward(al * fields[0] + be * fields[1]);
  double num = 0, den = 0;
  for (std::size_t sl = 0; sl < cab.coeffs.size(); ++sl)
    for (std::size_t k = 0; k < cab.coeffs[sl].size(); ++k) {
      num += std::norm(cab.coeffs[sl][k] - (al * ca.coeffs[sl][k] + be * cb.coeffs[sl][k]));
      den += std::norm(cab.coeffs[sl][k]);
    }
  s.at_most("linearity, relative coefficient error", std::sqrt(num / den), 1e-12);
  // single eigenmode round trip
  auto e = gf.zeros();
  e.coeffs[3][5] = 1.0;
  const ComplexField mode = gf.inverse(e);
  const auto back = gf.forward(mode);
  double mode_err = 0;
  for (std::size_t sl = 0; sl < back.coeffs.size(); ++sl)
    for (std::size_t k = 0; k < back.coeffs[sl].size(); ++k)
      mode_err = std::max(mode_err, std::abs(back.coeffs[sl][k] - e.coeffs[sl][k]));
  s.at_most("single eigenmode round trip", mode_err, 1e-8);
}

// ---------------------------------------------------------------- duhamel

struct ModeProblem {
  double a, u0, u1, T;
  std::function<double(double)> f;
};

std::array<double, 2> ode_oracle(const ModeProblem &p) {
  namespace ode = boost::numeric::odeint;
  using state = std::array<double, 2>;
  state x{p.u0, p.u1};
  auto rhs = [&](const state &v, state &dv, double t) {
    dv[0] = v[1];
    dv[1] = -p.a * p.a * v[0] + p.f(t);
  };
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-14, 1e-14), rhs, x, 0.0, p.T,
                          1e-4);
  return x;
}

std::array<double, 2> mode_duhamel(const ModeProblem &p, int samples, linear::Quadrature q) {
  std::vector<double> times(samples);
  for (int m = 0; m < samples; ++m)
    times[m] = p.T * m / (samples - 1);
  std::vector<double> wu, wut;
  linear::duhamel_weights(p.a, times, p.T, q, wu, wut);
  double u = std::cos(p.a * p.T) * p.u0 + linear::sin_over_a(p.a, p.T) * p.u1;
  double ut = -p.a * std::sin(p.a * p.T) * p.u0 + std::cos(p.a * p.T) * p.u1;
  for (int m = 0; m < samples; ++m) {
    const double fm = p.f(times[m]);
    u += wu[m] * fm;
    ut += wut[m] * fm;
  }
  return {u, ut};
}

void duhamel(Suite &s) {
  const std::vector<ModeProblem> modes = {
      {0.0, 0.3, -0.7, 2.0, [](double t) { return std::cos(1.3 * t) + 0.5 * t * t; }},
      {0.4, 1.0, 0.2, 2.0, [](double t) { return std::exp(-t) * std::sin(2 * t); }},
      {1.0, -0.5, 0.9, 2.0, [](double t) { return 1.0 / (1 + t * t); }},
      {std::sqrt(3.0), 0.8, 0.0, 2.0, [](double t) { return std::cos(std::sqrt(3.0) * t); }},
      {5.0, 0.1, -0.3, 2.0, [](double t) { return t * std::exp(-0.5 * t); }},
      {12.0, 0.2, 0.4, 1.5, [](double t) { return std::sin(3 * t) + 0.1; }},
  };
  for (auto [q, qname] : {std::pair{linear::Quadrature::Linear, "linear"},
                          std::pair{linear::Quadrature::Trapezoid, "trapezoid"}}) {
    double worst = 0;
    for (const ModeProblem &p : modes) {
      const auto ref = ode_oracle(p);
      const auto got = mode_duhamel(p, 4001, q);
      const double scale = std::max({std::abs(ref[0]), std::abs(ref[1]) / std::max(p.a, 1.0), 1e-300});
      worst = std::max({worst, std::abs(got[0] - ref[0]) / scale,
                        std::abs(got[1] - ref[1]) / std::max(p.a, 1.0) / scale});
    }
    s.at_most(std::string("per-mode vs adaptive ODE oracle, ") + qname + " quadrature", worst, 1e-6);
  }

  // homogeneous per-mode energy on a field
  const Grid3 g(40, 40, 32, 6.0, 6.0, 6.0);
  const GroupFourier gf(g, 16);
  const ScalarField u0 = ScalarField::from_function(g, [](double x, double y, double t) { return gauss(x, y, t); });
  const ScalarField u1 =
      ScalarField::from_function(g, [](double x, double y, double t) { return x * gauss(x - 0.2, y, t, 1.1, 1.2); });
  const auto c0 = gf.forward(u0), c1 = gf.forward(u1);
  const double T = 3.0;
  std::vector<spectral::SpectralCoeffs> f = {gf.zeros(), gf.zeros()};
  spectral::SpectralCoeffs cT, ctT;
  linear::propagate_coeffs(gf, c0, c1, f, {0.0, T}, T, linear::Quadrature::Trapezoid, cT, ctT);
  double worst_e = 0, emax = 0;
  for (int sl = 0; sl < gf.slot_count(); ++sl)
    for (std::size_t k = 0; k < c0.coeffs[sl].size(); ++k)
      emax = std::max(emax, gf.a2(sl)[k] * std::norm(c0.coeffs[sl][k]) + std::norm(c1.coeffs[sl][k]));
  for (int sl = 0; sl < gf.slot_count(); ++sl)
    for (std::size_t k = 0; k < c0.coeffs[sl].size(); ++k) {
      const double a2 = gf.a2(sl)[k];
      const double e0 = a2 * std::norm(c0.coeffs[sl][k]) + std::norm(c1.coeffs[sl][k]);
      const double e1 = a2 * std::norm(cT.coeffs[sl][k]) + std::norm(ctT.coeffs[sl][k]);
      if (e0 > 1e-24 * emax)
        worst_e = std::max(worst_e, std::abs(e1 - e0) / e0);
    }
  s.at_most("homogeneous per-mode energy drift", worst_e, 1e-10);

  // spectral vs leapfrog under refinement
  std::vector<double> diffs;
  for (int n : {48, 96}) {
    const Grid3 gr(n, n, 32, 6.0, 6.0, 6.0);
    const GroupFourier gfr(gr, 20);
    const HeisenbergCalculus calc(gr, 4);
    const ScalarField w0 = ScalarField::from_function(gr, [](double x, double y, double t) { return gauss(x, y, t, 1.2, 1.4); });
    const ScalarField w1(gr);
    const double Tw = 0.5;
    linear::SourceTrace zero{{0.0, Tw}, {ScalarField(gr), ScalarField(gr)}};
    const auto spec = linear::duhamel_propagate(w0, w1, zero, Tw, gfr);
    const double bound = linear::leapfrog_dt_bound(calc);
    const int steps = int(std::ceil(Tw / (0.5 * bound)));
    const auto lf = linear::leapfrog_propagate(w0, w1, [&](double) { return ScalarField(gr); }, Tw, Tw / steps, calc);
    diffs.push_back(l2_norm(lf.state.u - spec.u) / l2_norm(spec.u));
  }
  s.info("spectral vs leapfrog rel L2, 48^2 x 32", diffs[0]);
  s.at_most("spectral vs leapfrog rel L2, 96^2 x 32", diffs[1], std::min(diffs[0], 5e-4));
}

// ---------------------------------------------------------------- energy estimate

void lemma33(Suite &s) {
  const Grid3 g(40, 40, 32, 6.0, 6.0, 6.0);
  const GroupFourier gf(g, 16);
  const double T = 0.5;
  const int M = 11;
  auto trace_of = [&](const std::function<double(double, double, double, double)> &f) {
    linear::SourceTrace tr;
    for (int m = 0; m < M; ++m) {
      const double t = T * m / (M - 1);
      tr.times.push_back(t);
      tr.snapshots.push_back(ScalarField::from_function(g, [&](double x, double y, double tau) { return f(t, x, y, tau); }));
    }
    return tr;
  };
  {
    const ScalarField u0 = ScalarField::from_function(g, [](double x, double y, double t) { return gauss(x, y, t); });
    const auto zero = trace_of([](double, double, double, double) { return 0.0; });
    const auto r = linear::energy_lemma_check(u0, ScalarField(g), zero, T, gf, 64.0);
    s.at_least("f = 0, u1 = 0: first-order ratio", r.ratio_first, 1.0 / 3.0);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-1.0, 1.0), w(0.8, 1.6);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 6; ++trial) {
    const double x0 = c(rng), y0 = c(rng), t0 = c(rng), w0 = w(rng), wt0 = w(rng);
    const double x1 = c(rng), y1 = c(rng), w1 = w(rng), a1 = c(rng);
    const double af = c(rng), om = 3 * w(rng), wf = w(rng);
    const ScalarField u0 =
        ScalarField::from_function(g, [&](double x, double y, double t) { return gauss(x - x0, y - y0, t - t0, w0, wt0); });
    const ScalarField u1 =
        ScalarField::from_function(g, [&](double x, double y, double t) { return a1 * gauss(x - x1, y - y1, t, w1, 1.2); });
    const auto f = trace_of([&](double t, double x, double y, double tau) {
      return af * std::cos(om * t) * gauss(x + 0.3, y, tau, wf, 1.1);
    });
    const auto r = linear::energy_lemma_check(u0, u1, f, T, gf, 64.0);
    worst = std::min(worst, r.min_ratio);
    char name[96];
    std::snprintf(name, sizeof name, "random data %d: min(RHS/LHS) over the estimates", trial);
    s.at_least(name, r.min_ratio, 1.0 / 64.0);
  }
  s.info("smallest observed ratio", worst);
}

// ---------------------------------------------------------------- madelung

void madelung_suite(Suite &s) {
  const Grid3 g(40, 40, 32, 6.0, 6.0, 6.0);
  const GroupFourier gf(g, 16);
  const HeisenbergCalculus &calc = geom::calculus_for(g, 4);
  for (double eps : {1.0, 0.5}) {
    madelung::HydroFields h{
        ScalarField::from_function(g, [](double x, double y, double t) { return 1 + 0.3 * gauss(x - 0.2, y, t, 1.2, 1.3); }),
        ScalarField::from_function(g, [](double x, double y, double t) { return 0.6 * gauss(x, y + 0.3, t, 1.3, 1.5); }),
        ScalarField::from_function(g, [](double x, double y, double t) { return 0.1 * x * gauss(x, y, t); }),
        ScalarField::from_function(g, [](double x, double y, double t) { return -0.2 * gauss(x, y, t - 0.2); }),
        ScalarField(g)};
    const auto k = madelung::hydro_to_kgp(h, eps);
    const auto r = madelung::kgp_to_hydro(k, gf, calc);
    const HorizontalField gS = calc.gradient(h.S);
    const double en = max_abs(r.h.n - h.n) / max_abs(h.n);
    const double eg = std::max(max_abs(r.grad_S.a - gS.a), max_abs(r.grad_S.b - gS.b)) /
                      std::max(max_abs(gS.a), max_abs(gS.b));
    const double et = max_abs(r.h.S_t - h.S_t) / max_abs(h.S_t);
    const double ent = max_abs(r.h.n_t - h.n_t) / max_abs(h.n_t);
    char name[96];
    std::snprintf(name, sizeof name, "eps = %.1f: round trip n, rel max", eps);
    s.at_most(name, en, 1e-9);
    std::snprintf(name, sizeof name, "eps = %.1f: round trip grad S, rel max", eps);
    s.at_most(name, eg, 1e-9);
    std::snprintf(name, sizeof name, "eps = %.1f: round trip S_t, rel max", eps);
    s.at_most(name, et, 1e-9);
    std::snprintf(name, sizeof name, "eps = %.1f: round trip n_t, rel max", eps);
    s.at_most(name, ent, 1e-9);
    ScalarField dS = r.h.S - h.S;
    dS += -shell_mean(dS, calc.shell());
    std::snprintf(name, sizeof name, "eps = %.1f: recovered S, interior rel L2", eps);
    s.info(name, l2_norm_interior(dS, calc.shell()) / l2_norm(h.S));

    madelung::HydroFields h2 = h;
    h2.S += 2 * std::numbers::pi * eps;
    const auto k2 = madelung::hydro_to_kgp(h2, eps);
    std::snprintf(name, sizeof name, "eps = %.1f: S -> S + 2 pi eps, max |dPhi|", eps);
    s.at_most(name, std::max(max_abs(k2.Phi - k.Phi), max_abs(k2.Phi_t - k.Phi_t)), 1e-13);
  }
  const ScalarField n = ScalarField::from_function(g, [](double x, double y, double t) { return 1 + 0.4 * gauss(x, y, t); });
  const ScalarField S = ScalarField::from_function(g, [](double x, double y, double t) { return 0.5 * gauss(x - 0.3, y, t, 1.2, 1.2); });
  const double d1 = madelung::convective_identity_defect(n, S, calc);
  const double d3 = madelung::convective_identity_defect(3.0 * n, S, calc);
  s.at_most("identity defect homogeneity in n, rel", std::abs(d3 - 3 * d1) / (3 * d1), 1e-12);
  // constant state has zero residuals
  madelung::HydroFields c0{ScalarField(g, 1.0), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  const auto rc = madelung::residual_continuity(c0, ScalarField(g), 1.0, calc);
  const auto rh = madelung::residual_hamilton_jacobi(c0, ScalarField(g), 1.0, 1.0, calc);
  s.at_most("constant state, continuity and HJ residuals", std::max(max_abs(rc), max_abs(rh)), 1e-12);
}

// ---------------------------------------------------------------- identity

void identity210(Suite &s) {
  auto run = [&](const char *label, const std::function<double(double, double, double)> &nf,
                 const std::function<double(double, double, double)> &Sf) {
    std::vector<double> d;
    for (int n : {48, 96, 192}) {
      const Grid3 g(n, n, 32, 6.0, 6.0, 6.0);
      const HeisenbergCalculus calc(g, 4);
      d.push_back(madelung::convective_identity_defect(ScalarField::from_function(g, nf), ScalarField::from_function(g, Sf), calc));
    }
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
      char name[128];
      std::snprintf(name, sizeof name, "%s: defect order, h/%d -> h/%d", label, 1 << k, 2 << k);
      s.at_least(name, observed_order(d[k], d[k + 1]), 3.0);
    }
    char name[128];
    std::snprintf(name, sizeof name, "%s: defect at 192^2 x 32", label);
    s.info(name, d.back());
  };
  run("generic (n, S)",
      [](double x, double y, double t) { return 1 + 0.4 * gauss(x - 0.3, y, t, 1.2, 1.4); },
      [](double x, double y, double t) { return (0.5 + 0.2 * x) * gauss(x, y + 0.2, t - 0.1, 1.1, 1.3); });
  run("n = 1, S independent of tau", [](double, double, double) { return 1.0; },
      [](double x, double y, double) { return 0.7 * std::exp(-(x * x + 0.8 * y * y) / 1.5); });
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const HeisenbergCalculus calc(g, 4);
  const ScalarField n = ScalarField::from_function(g, [](double x, double y, double t) { return 1 + 0.4 * gauss(x, y, t); });
  s.at_most("S constant: defect", madelung::convective_identity_defect(n, ScalarField(g, 2.5), calc), 1e-12);
}

// ---------------------------------------------------------------- source bounds

void lemma41(Suite &s) {
  const Grid3 g(32, 32, 16, 7.0, 7.0, 7.0);
  const GroupFourier gf(g, 12);
  const HeisenbergCalculus calc(g, 4);
  solver::IterationConfig cfg;
  cfg.quadrature = linear::Quadrature::Linear;
  cfg.T_final = 0.5;
  const solver::PicardSolver ps(gf, calc, cfg);
  auto data = [&](double A) {
    solver::InitialData d{ScalarField::from_function(g, [A](double x, double y, double t) { return 1 + A * gauss(x, y, t); }),
                          ScalarField(g), ScalarField(g), ScalarField(g)};
    return d;
  };
  solver::RunOptions opts;
  opts.energy = false;
  opts.reduced_residuals = false;
  const auto r = ps.run(data(0.01), opts);
  s.at_most("small-perturbation run status (0 = converged)", double(int(r.status)), 0.0);
  if (r.status == solver::RunStatus::Converged) {
    const char *names[5] = {"F1", "F2", "F3", "F4", "F5"};
    for (int k = 0; k < 5; ++k)
      s.at_most(std::string("max LHS/RHS, ") + names[k], r.source_bounds.max_ratio[k], cfg.source_slack);
    s.at_most("source identity F4 rho~ + 2 rho_t - F1", r.max_source_identity, 1e-12);
  }
  // constant state: every source vanishes
  const auto rc = ps.run(data(0.0), opts);
  double lhs = 0;
  for (const auto &row : rc.source_bounds.rows)
    for (double v : row.lhs)
      lhs = std::max(lhs, v);
  s.at_most("constant state: largest source norm", lhs, 0.0);
  // F5 = rho^2 - nbar is linear plus quadratic in the deviation: squared norm ratio -> 4
  auto f5 = [&](double A) {
    solver::HydroState U = ps.init_state(data(A));
    return std::pow(geom::sobolev_norm(solver::compute_sources(U, cfg, calc).F5, 3, calc), 2);
  };
  s.at_most("||F5(2A)||^2 / ||F5(A)||^2 - 4, A = 1e-3", std::abs(f5(2e-3) / f5(1e-3) - 4), 0.02);
}

const std::map<std::string, std::function<void(Suite &)>> &registry() {
  static const std::map<std::string, std::function<void(Suite &)>> r = {
      {"geometry", geometry},   {"spectrum", spectrum}, {"plancherel", plancherel},   {"duhamel", duhamel},
      {"madelung", madelung_suite}, {"identity210", identity210}, {"lemma33", lemma33}, {"lemma41", lemma41},
  };
  return r;
}

} // namespace

const std::vector<std::string> &suite_names() {
  static const std::vector<std::string> names = {"geometry", "spectrum",    "plancherel", "duhamel",
                                                 "madelung", "identity210", "lemma33",    "lemma41"};
  return names;
}

SuiteReport run_suite(const std::string &name) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string list;
    for (const auto &n : suite_names())
      list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown suite '" + name + "'; available: " + list);
  }
  Suite s;
  s.report.suite = name;
  const auto t0 = std::chrono::steady_clock::now();
  it->second(s);
  s.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s.report;
}

} // namespace hrqhd::verify
