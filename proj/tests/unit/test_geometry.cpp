#include "hrqhd/group.hpp"
#include "hrqhd/operators.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace hrqhd;

namespace {

geom::GroupPoint gp(const std::array<double, 3> &a) { return {a[0], a[1], a[2]}; }

double max_interior_error(const ScalarField &u, const std::function<double(double, double, double)> &exact, int shell) {
  const Grid3 &g = u.grid();
  const auto r = interior(g, shell);
  double e = 0;
  for (int i = r.i0; i < r.i1; ++i)
    for (int j = r.j0; j < r.j1; ++j)
      for (int k = 0; k < g.ntau; ++k)
        e = std::max(e, std::abs(u.at(i, j, k) - exact(g.x(i), g.y(j), g.tau(k))));
  return e;
}

} // namespace

TEST_CASE("group law matches the reference product") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int n = 0; n < 500; ++n) {
    const std::array<double, 3> p{U(rng), U(rng), U(rng)}, q{U(rng), U(rng), U(rng)};
    const auto a = geom::group_mul(gp(p), gp(q));
    const auto b = oracle::group_mul(p, q);
    CHECK(a.x == doctest::Approx(b[0]).epsilon(1e-15));
    CHECK(a.y == doctest::Approx(b[1]).epsilon(1e-15));
    CHECK(a.tau == doctest::Approx(b[2]).epsilon(1e-14));
  }
}

TEST_CASE("group properties on random triples") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-5, 5);
  for (int n = 0; n < 1000; ++n) {
    const geom::GroupPoint p{U(rng), U(rng), U(rng)}, q{U(rng), U(rng), U(rng)}, r{U(rng), U(rng), U(rng)};
    const auto l = geom::group_mul(geom::group_mul(p, q), r);
    const auto rr = geom::group_mul(p, geom::group_mul(q, r));
    CHECK(std::abs(l.tau - rr.tau) <= 1e-12);
    const auto e = geom::group_mul(p, geom::group_inv(p));
    CHECK(std::abs(e.x) + std::abs(e.y) + std::abs(e.tau) <= 1e-12);
    // dilations are automorphisms and the norm is homogeneous of degree 1
    const double L = 0.1 + std::abs(U(rng));
    const auto dl = geom::dilate(geom::group_mul(p, q), L);
    const auto ld = geom::group_mul(geom::dilate(p, L), geom::dilate(q, L));
    CHECK(std::abs(dl.tau - ld.tau) <= 1e-10 * (1 + std::abs(dl.tau)));
    CHECK(geom::homogeneous_norm(geom::dilate(p, L)) == doctest::Approx(L * geom::homogeneous_norm(p)).epsilon(1e-12));
  }
}

TEST_CASE("fornberg weights reproduce the classical central stencils") {
  const auto w2 = geom::fornberg_weights(1, 0.0, {-1, 0, 1});
  CHECK(w2[0] == doctest::Approx(-0.5));
  CHECK(w2[1] == doctest::Approx(0.0));
  CHECK(w2[2] == doctest::Approx(0.5));
  const auto w4 = geom::fornberg_weights(1, 0.0, {-2, -1, 0, 1, 2});
  const double ref[] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i)
    CHECK(w4[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  const auto d2 = geom::fornberg_weights(2, 0.0, {-1, 0, 1});
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(d2[1] == doctest::Approx(-2.0));
}

TEST_CASE("stencils are exact on polynomials up to their order, including the closures") {
  for (int p : {2, 4, 6, 8}) {
    const int n = 20;
    const double h = 0.3;
    geom::Stencil1D s(n, h, p);
    for (int deg = 0; deg <= p; ++deg)
      for (int i = 0; i < n; ++i) {
        double d = 0;
        for (int m = 0; m < s.width(); ++m) {
          const double xm = (s.start(i) + m) * h;
          d += s.weights(i)[m] * std::pow(xm, deg);
        }
        const double xi = i * h;
        const double exact = deg == 0 ? 0.0 : deg * std::pow(xi, deg - 1);
        CHECK(std::abs(d - exact) <= 1e-8 * (1 + std::abs(exact)));
      }
  }
}

TEST_CASE("X, Y and the sub-Laplacian converge to the closed forms at the stencil order") {
  const oracle::Gaussian G{1.2, 1.0};
  std::vector<double> ex, el;
  for (int n : {32, 64, 128}) {
    const Grid3 g(n, n, 48, 6.0, 6.0, 6.0);
    const geom::HeisenbergCalculus calc(g, 4);
    const auto u = ScalarField::from_function(g, [&](double x, double y, double t) { return G.value(x, y, t); });
    const auto X = calc.X(u);
    ex.push_back(max_interior_error(X, [&](double x, double y, double t) { return G.X(x, y, t); }, calc.shell()));
    const auto Lu = calc.sub_laplacian(u);
    el.push_back(max_interior_error(Lu, [&](double x, double y, double t) { return G.lap(x, y, t); }, calc.shell()));
  }
  for (std::size_t k = 0; k + 1 < ex.size(); ++k) {
    CHECK(oracle::observed_order(ex[k], ex[k + 1]) >= 3.5);
    CHECK(oracle::observed_order(el[k], el[k + 1]) >= 3.5);
  }
  CHECK(ex.back() < 1e-4);
}

TEST_CASE("Y converges at sixth order and dtau is spectrally exact") {
  const oracle::Gaussian G{1.0, 0.9};
  std::vector<double> ey;
  for (int n : {48, 96, 192}) {
    const Grid3 g(n, n, 48, 6.0, 6.0, 6.0);
    const geom::HeisenbergCalculus calc(g, 6);
    const auto u = ScalarField::from_function(g, [&](double x, double y, double t) { return G.value(x, y, t); });
    ey.push_back(max_interior_error(calc.Y(u), [&](double x, double y, double t) { return G.Y(x, y, t); }, calc.shell()));
    if (n == 48)
      CHECK(max_interior_error(calc.dtau(u), [&](double x, double y, double t) { return G.dt(x, y, t); }, 0) < 1e-9);
  }
  CHECK(oracle::observed_order(ey[0], ey[1]) >= 5.0);
  CHECK(oracle::observed_order(ey[1], ey[2]) >= 5.0);
}

TEST_CASE("transposes agree with the grid inner product") {
  const Grid3 g(20, 18, 8, 4.0, 3.0, 2.0);
  const geom::HeisenbergCalculus calc(g, 4);
  std::mt19937 rng(3);
  std::normal_distribution<double> N01;
  ScalarField u(g), v(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    u[n] = N01(rng), v[n] = N01(rng);
  CHECK(inner(calc.X(u), v) == doctest::Approx(inner(u, calc.X_transpose(v))).epsilon(1e-12));
  CHECK(inner(calc.Y(u), v) == doctest::Approx(inner(u, calc.Y_transpose(v))).epsilon(1e-12));
}

TEST_CASE("sobolev norm of a constant is its L2 norm") {
  const Grid3 g(16, 16, 8, 3.0, 3.0, 3.0);
  const ScalarField one(g, 2.0);
  const auto &calc = geom::calculus_for(g, 4);
  CHECK(geom::sobolev_norm(one, 3, calc) == doctest::Approx(l2_norm(one)).epsilon(1e-14));
}
