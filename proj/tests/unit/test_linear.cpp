#include "hrqhd/error.hpp"
#include "hrqhd/poisson.hpp"
#include "hrqhd/wave.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace hrqhd;

TEST_CASE("per-mode kernels agree with the closed forms and their a = 0 limits") {
  for (double a : {0.0, 1e-9, 0.3, 2.0, 17.0})
    for (double t : {0.0, 0.1, 1.3}) {
      const double s = a == 0 ? t : std::sin(a * t) / a;
      const double c = a == 0 ? 0.5 * t * t : 2 * std::pow(std::sin(0.5 * a * t) / a, 2);
      CHECK(linear::sin_over_a(a, t) == doctest::Approx(s).epsilon(1e-12));
      CHECK(linear::one_minus_cos_over_a2(a, t) == doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("Duhamel weights integrate a sampled source like the ODE oracle") {
  auto f = [](double t) { return std::cos(1.7 * t) + 0.3 * t * t; };
  const double T = 1.2;
  std::vector<double> times;
  for (int m = 0; m <= 2400; ++m)
    times.push_back(T * m / 2400);
  for (double a : {0.0, 0.5, 3.0})
    for (auto q : {linear::Quadrature::Trapezoid, linear::Quadrature::Linear}) {
      std::vector<double> wu, wut;
      linear::duhamel_weights(a, times, T, q, wu, wut);
      double u = 0, ut = 0;
      for (std::size_t m = 0; m < times.size(); ++m)
        u += wu[m] * f(times[m]), ut += wut[m] * f(times[m]);
      const auto ref = oracle::forced_oscillator(a, 0.0, 0.0, f, T);
      CHECK(std::abs(u - ref[0]) <= 1e-6 * std::max(1.0, std::abs(ref[0])));
      CHECK(std::abs(ut - ref[1]) <= 1e-6 * std::max(1.0, std::abs(ref[1])));
    }
}

TEST_CASE("SourceTrace validation") {
  const Grid3 g(4, 4, 8, 1, 1, 1);
  linear::SourceTrace ok{{0.0, 0.5, 1.0}, {ScalarField(g), ScalarField(g), ScalarField(g)}};
  CHECK_NOTHROW(ok.validate(0.0, 1.0));
  CHECK_THROWS(ok.validate(0.0, 1.5));
  linear::SourceTrace bad{{0.0, 0.0, 1.0}, {ScalarField(g), ScalarField(g), ScalarField(g)}};
  CHECK_THROWS(bad.validate(0.0, 1.0));
  linear::SourceTrace mismatch{{0.0, 1.0}, {ScalarField(g)}};
  CHECK_THROWS(mismatch.validate(0.0, 1.0));
}

TEST_CASE("leapfrog refuses a step above the computed bound") {
  const Grid3 g(16, 16, 8, 4.0, 4.0, 4.0);
  const geom::HeisenbergCalculus calc(g, 4);
  const double bound = linear::leapfrog_dt_bound(calc);
  REQUIRE(bound > 0);
  const ScalarField u0(g, 0.0), u1(g, 0.0);
  auto zero = [&](double) { return ScalarField(g); };
  try {
    (void)linear::leapfrog_propagate(u0, u1, zero, 10 * bound, 1.5 * bound, calc);
    FAIL("expected UnstableStepError");
  } catch (const UnstableStepError &e) {
    CHECK(e.bound() == doctest::Approx(bound));
  }
  CHECK_NOTHROW(linear::leapfrog_propagate(u0, u1, zero, 4 * bound, 0.5 * bound, calc));
}

TEST_CASE("spectral Poisson solve inverts the closed-form sub-Laplacian") {
  const Grid3 g(64, 64, 32, 8.0, 8.0, 8.0);
  const spectral::GroupFourier gf(g, 28);
  const oracle::RadialMode R{1.2, 2 * std::numbers::pi / 8.0};
  const auto u = ScalarField::from_function(g, [&](double x, double y, double t) { return R.value(x, y, t); });
  const auto Lu = ScalarField::from_function(g, [&](double x, double y, double t) { return R.lap(x, y, t); });
  // -L v = -Lu  ->  v = u (the mode has zero tau mean, so no gauge ambiguity)
  const auto r = linear::solve_poisson(-1.0 * Lu, -1, gf);
  CHECK(l2_norm(r.u - u) / l2_norm(u) < 1e-4);
  CHECK(r.dropped_mean == 0.0);
}

TEST_CASE("Poisson solve rejects an incompatible mean unless asked to project it") {
  const Grid3 g(32, 32, 16, 6.0, 6.0, 6.0);
  const spectral::GroupFourier gf(g, 12);
  const ScalarField c(g, 1.0);
  CHECK_THROWS_AS(linear::solve_poisson(c, -1, gf), IncompatibleSourceError);
  linear::PoissonOptions o;
  o.project_mean = true;
  const auto r = linear::solve_poisson(c, -1, gf, o);
  CHECK(r.dropped_mean != 0.0);
  CHECK(max_abs(r.u) < 1e-10);
}

TEST_CASE("CG cross-check agrees with the spectral solve") {
  const Grid3 g(40, 40, 16, 6.0, 6.0, 6.0);
  const spectral::GroupFourier gf(g, 16);
  const geom::HeisenbergCalculus calc(g, 4);
  const oracle::RadialMode R{1.0, 2 * std::numbers::pi / 6.0};
  const auto rhs = ScalarField::from_function(g, [&](double x, double y, double t) { return R.value(x, y, t); });
  const auto sp = linear::solve_poisson(rhs, -1, gf);
  const auto cg = linear::solve_poisson_cg(rhs, -1, calc, 1e-10);
  REQUIRE(cg.converged);
  CHECK(l2_norm(cg.u - sp.u) / l2_norm(sp.u) < 2e-2);
}
