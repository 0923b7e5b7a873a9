#include "hrqhd/error.hpp"
#include "hrqhd/madelung.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace hrqhd;

TEST_CASE("nondimensionalize gives epsilon and upsilon from the physical scales") {
  madelung::PhysicalParams p{2.0, 10.0, 0.5, 3.0, 1.5};
  const auto s = madelung::nondimensionalize(p);
  const double U = 3.0 / 1.5;
  CHECK(s.upsilon == doctest::Approx(U / 10.0));
  CHECK(s.epsilon == doctest::Approx(0.5 / (2.0 * U * U * 1.5)));
  p.mass = 0;
  CHECK_THROWS_AS(madelung::nondimensionalize(p), ConfigError);
}

TEST_CASE("hydro to KGP: modulus, phase and chain rule") {
  const Grid3 g(8, 8, 8, 2.0, 2.0, 2.0);
  madelung::HydroFields h{ScalarField(g, 4.0), ScalarField(g, 0.3), ScalarField(g, 0.8), ScalarField(g, -0.2),
                          ScalarField(g)};
  const double eps = 0.5;
  const auto k = madelung::hydro_to_kgp(h, eps);
  const cplx phi = 2.0 * std::exp(cplx(0, 0.3 / eps));
  const cplx phit = (0.8 / (2 * 2.0) + cplx(0, -0.2 / eps) * 2.0) * std::exp(cplx(0, 0.3 / eps));
  CHECK(std::abs(k.Phi[5] - phi) < 1e-14);
  CHECK(std::abs(k.Phi_t[5] - phit) < 1e-14);
  h.n[3] = 0.0;
  CHECK_THROWS_AS(madelung::hydro_to_kgp(h, eps), VacuumError);
}

TEST_CASE("KGP round trip recovers n, its time derivative and the horizontal momentum") {
  const Grid3 g(40, 40, 32, 6.0, 6.0, 6.0);
  const spectral::GroupFourier gf(g, 16);
  const geom::HeisenbergCalculus calc(g, 4);
  const oracle::Gaussian A{1.2, 1.0}, B{1.0, 1.3};
  madelung::HydroFields h;
  h.n = ScalarField::from_function(g, [&](double x, double y, double t) { return 1 + 0.3 * A.value(x, y, t); });
  h.S = ScalarField::from_function(g, [&](double x, double y, double t) { return 0.4 * B.value(x, y, t); });
  h.n_t = ScalarField::from_function(g, [&](double x, double y, double t) { return 0.1 * B.value(x, y, t); });
  h.S_t = ScalarField::from_function(g, [&](double x, double y, double t) { return -0.2 * A.value(x, y, t); });
  h.V = ScalarField(g);
  const auto k = madelung::hydro_to_kgp(h, 1.0);
  const auto r = madelung::kgp_to_hydro(k, gf, calc);
  CHECK(max_abs(r.h.n - h.n) / max_abs(h.n) < 1e-9);
  CHECK(max_abs(r.h.n_t - h.n_t) / max_abs(h.n_t) < 1e-9);
  CHECK(max_abs(r.h.S_t - h.S_t) / max_abs(h.S_t) < 1e-9);
  const auto gS = calc.gradient(h.S);
  CHECK(max_abs(r.grad_S.a - gS.a) / max_abs(gS.a) < 1e-9);
  CHECK(max_abs(r.grad_S.b - gS.b) / max_abs(gS.b) < 1e-9);
}

TEST_CASE("reduced system residuals vanish on an exact spatially constant solution") {
  // rho = 1, S = c t, V = (c^2 - 2c)/2 solves the reduced system with nbar = 1
  const Grid3 g(16, 16, 8, 3.0, 3.0, 3.0);
  const geom::HeisenbergCalculus calc(g, 4);
  const double c = 0.7;
  madelung::ReducedState s{ScalarField(g, 1.0), ScalarField(g), ScalarField(g), ScalarField(g, 0.3),
                           ScalarField(g, c),   ScalarField(g), ScalarField(g, 0.5 * (c * c - 2 * c)), 1.0};
  const auto r = madelung::residual_reduced_system(s, calc);
  CHECK(max_abs(r.wave_rho) < 1e-14);
  CHECK(max_abs(r.wave_S) < 1e-14);
  CHECK(max_abs(r.poisson) < 1e-12);
  // a wrong potential shows up in the rho equation only
  s.V += 0.1;
  const auto w = madelung::residual_reduced_system(s, calc);
  CHECK(max_abs(w.wave_rho) == doctest::Approx(0.2));
  CHECK(max_abs(w.wave_S) < 1e-14);
}

TEST_CASE("convective identity defect is linear in n and zero for constant phase") {
  const Grid3 g(32, 32, 16, 6.0, 6.0, 6.0);
  const geom::HeisenbergCalculus calc(g, 4);
  const oracle::Gaussian A{1.2, 1.0};
  const auto n = ScalarField::from_function(g, [&](double x, double y, double t) { return 1 + 0.2 * A.value(x, y, t); });
  const auto S = ScalarField::from_function(g, [&](double x, double y, double t) { return 0.5 * A.value(x - 0.4, y, t); });
  const double d1 = madelung::convective_identity_defect(n, S, calc);
  CHECK(madelung::convective_identity_defect(2.5 * n, S, calc) == doctest::Approx(2.5 * d1).epsilon(1e-12));
  CHECK(madelung::convective_identity_defect(n, ScalarField(g, 1.3), calc) < 1e-30);
}
