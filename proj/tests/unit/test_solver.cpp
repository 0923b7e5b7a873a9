#include "hrqhd/error.hpp"
#include "hrqhd/solver.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace hrqhd;

namespace {

solver::InitialData bump(const Grid3 &g, double A) {
  const oracle::Gaussian G{1.0, 1.0};
  return {ScalarField::from_function(g, [&](double x, double y, double t) { return 1 + A * G.value(x, y, t); }),
          ScalarField(g), ScalarField(g), ScalarField(g)};
}

solver::HydroState constant_state(const Grid3 &g, double t) {
  solver::HydroState U;
  U.t = t;
  U.rho = U.rho_tilde = ScalarField(g, 1.0);
  U.rho_t = U.S = U.S_t = U.S_tilde = U.V = ScalarField(g);
  U.rho_tt = U.S_tt = U.lap_S_tilde = U.lap_V = ScalarField(g);
  return U;
}

} // namespace

TEST_CASE("T0 and a0 follow their closed forms") {
  solver::IterationConfig cfg;
  cfg.C_const = 1.0;
  cfg.delta = 0.25;
  for (double M : {0.3, 0.7249, 2.0}) {
    const double ref = std::min({std::log(2.0) / M, std::sqrt(0.25) / (4 * M * M), 1 / M, 1 / (12 * std::pow(M, 9))});
    CHECK(solver::compute_T0(M, cfg) == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(std::isinf(solver::compute_T0(0.0, cfg)));
  cfg.C_m = 2.0;
  cfg.m_exp = 10;
  CHECK(solver::compute_a0(1.5, 0.5, cfg) == doctest::Approx(2.0 * std::pow(2.5 / 0.5, 10)).epsilon(1e-14));
}

TEST_CASE("rho~ update matches the integrating-factor closed form for constant traces") {
  const Grid3 g(4, 4, 8, 1, 1, 1);
  const double f = 0.3, s = -0.8, r0 = 1.2, T = 0.6;
  linear::SourceTrace F1, LS;
  for (int m = 0; m <= 1000; ++m) {
    const double t = T * m / 1000;
    F1.times.push_back(t), LS.times.push_back(t);
    F1.snapshots.emplace_back(g, f), LS.snapshots.emplace_back(g, s);
  }
  const ScalarField rt = solver::update_rho_tilde(ScalarField(g, r0), F1, LS, T);
  const double E = std::exp(-0.5 * s * T);
  const double ref = E * r0 + (f / s) * (1 - E);
  CHECK(rt[0] == doctest::Approx(ref).epsilon(1e-7));
  const auto traj = solver::rho_tilde_trajectory(ScalarField(g, r0), F1, LS);
  CHECK(traj.back()[3] == doctest::Approx(rt[3]).epsilon(1e-13));
}

TEST_CASE("sources vanish on the constant state and obey the rho~ identity elsewhere") {
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::IterationConfig cfg;
  auto U = constant_state(g, 0.0);
  const auto F = solver::compute_sources(U, cfg, calc);
  for (const ScalarField *f : {&F.F1, &F.F2, &F.F3, &F.F4, &F.F5})
    CHECK(max_abs(*f) == 0.0);
  const oracle::Gaussian G{1.0, 1.2};
  U.rho = ScalarField::from_function(g, [&](double x, double y, double t) { return 1 + 0.1 * G.value(x, y, t); });
  U.rho_tilde = U.rho;
  U.rho_t = ScalarField::from_function(g, [&](double x, double y, double t) { return 0.05 * G.value(x - 1, y, t); });
  U.S = ScalarField::from_function(g, [&](double x, double y, double t) { return 0.2 * G.value(x, y + 1, t); });
  U.S_t = 0.5 * U.S;
  U.lap_S_tilde = calc.sub_laplacian(U.S);
  const auto F2 = solver::compute_sources(U, cfg, calc);
  CHECK(solver::source_identity_defect(U, F2) < 1e-12);
  U.rho_tilde = ScalarField(g, 0.1);
  CHECK_THROWS_AS(solver::compute_sources(U, cfg, calc), VacuumError);
}

TEST_CASE("equivalence check detects a harmonic defect invisible to the sub-Laplacian") {
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::Trajectory traj{constant_state(g, 0.0), constant_state(g, 0.1), constant_state(g, 0.2)};
  const auto clean = solver::equivalence_check(traj, 1e-6, calc);
  CHECK(clean.pass);
  CHECK(clean.max_rho == 0.0);
  // x is annihilated by X^2 + Y^2, so S~ - S = 1e-3 (1 + 0.2 x) passes the Laplacian test
  const auto h = ScalarField::from_function(g, [](double x, double, double) { return 1e-3 * (1 + 0.2 * x); });
  CHECK(max_abs(calc.sub_laplacian(h)) < 1e-15);
  traj[2].S_tilde = traj[2].S + h;
  const auto r = solver::equivalence_check(traj, 1e-6, calc);
  CHECK(r.max_lap < 1e-12);
  CHECK(r.max_S == doctest::Approx(max_abs(h)));
  CHECK_FALSE(r.pass);
}

TEST_CASE("stationary data is a fixed point: one sweep, zero norm") {
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const spectral::GroupFourier gf(g, 8);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::IterationConfig cfg;
  cfg.T_final = 0.2;
  cfg.dt = 0.05;
  cfg.quadrature = linear::Quadrature::Linear;
  const solver::PicardSolver ps(gf, calc, cfg);
  const auto r = ps.run(bump(g, 0.0));
  CHECK(r.status == solver::RunStatus::Converged);
  CHECK(r.iterations == 1);
  REQUIRE(r.log.rows.size() == 1);
  CHECK(r.log.rows[0].norm.total == 0.0);
  CHECK(r.M_star == 0.0);
  CHECK(r.T == 0.2);
  CHECK(r.min_rho_tilde == 1.0);
  CHECK(r.equivalence.pass);
}

TEST_CASE("base trajectory: U0 at t = 0, and the constant base never moves") {
  const Grid3 g(32, 32, 16, 7.0, 7.0, 7.0);
  const spectral::GroupFourier gf(g, 12);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::IterationConfig cfg;
  cfg.quadrature = linear::Quadrature::Linear;
  const solver::PicardSolver taylor(gf, calc, cfg);
  const auto U0 = taylor.init_state(bump(g, 0.01));
  const auto b = taylor.base_trajectory(U0, {0.0, 0.05, 0.1});
  CHECK(b[0].rho.values() == U0.rho.values());
  CHECK(max_abs(b[2].rho - (U0.rho + 0.1 * U0.rho_t + 0.005 * U0.rho_tt)) < 1e-15);
  cfg.taylor_base = false;
  const solver::PicardSolver flat(gf, calc, cfg);
  const auto c = flat.base_trajectory(U0, {0.0, 0.1});
  CHECK(c[1].rho.values() == U0.rho.values());
  CHECK(c[1].t == 0.1);
}

TEST_CASE("small perturbation converges with a contracting tail; picard_max = 1 reports non-contraction") {
  const Grid3 g(32, 32, 16, 7.0, 7.0, 7.0);
  const spectral::GroupFourier gf(g, 12);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::IterationConfig cfg;
  cfg.quadrature = linear::Quadrature::Linear;
  cfg.T_final = 0.5;
  const solver::PicardSolver ps(gf, calc, cfg);
  solver::RunOptions o;
  o.source_bounds = false;
  const auto r = ps.run(bump(g, 0.01), o);
  CHECK(r.status == solver::RunStatus::Converged);
  CHECK(r.log.rows.back().norm.total <= cfg.tol_low);
  CHECK(r.log.geometric_decay());
  CHECK(r.min_rho_tilde >= r.positivity_floor);
  CHECK(r.max_source_identity < 1e-12);
  CHECK(r.T == doctest::Approx(std::min(r.T0, cfg.T_final)));

  cfg.picard_max = 1;
  const solver::PicardSolver one(gf, calc, cfg);
  const auto n = one.run(bump(g, 0.01), o);
  CHECK(n.status == solver::RunStatus::NonContraction);
  CHECK(n.log.rows.size() == 1);
}

TEST_CASE("data below delta is a vacuum result with its location") {
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const spectral::GroupFourier gf(g, 8);
  const geom::HeisenbergCalculus calc(g, 4);
  const solver::PicardSolver ps(gf, calc, solver::IterationConfig{});
  const auto r = ps.run(bump(g, -0.9));
  CHECK(r.status == solver::RunStatus::Vacuum);
  CHECK(r.vac_value < 0.25);
  CHECK(std::abs(r.vac_x) < 0.5);
  CHECK(std::abs(r.vac_y) < 0.5);
  CHECK(r.vac_t == 0.0);
}
