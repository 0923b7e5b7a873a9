#include "hrqhd/group_fourier.hpp"
#include "hrqhd/hermite.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <filesystem>

using namespace hrqhd;

TEST_CASE("Hermite functions match the closed forms") {
  const std::vector<double> pts{-2.5, -1.0, -0.3, 0.0, 0.7, 1.9};
  for (double s : {1.0, 0.6, 1.7}) {
    const auto H = spectral::hermite_functions(4, s, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int p = 0; p < 4; ++p)
        CHECK(H(i, p) == doctest::Approx(oracle::hermite_function(p, pts[i] / s) / std::sqrt(s)).epsilon(1e-13));
  }
}

TEST_CASE("ladder matrices: x^2 and d^2/dx^2 are exact Galerkin matrices") {
  const int N = 10;
  const auto X = spectral::position_matrix(N), X2 = spectral::position_sq_matrix(N);
  const auto D = spectral::derivative_matrix(N), D2 = spectral::derivative_sq_matrix(N);
  // away from the truncation edge the products agree with the squares
  for (int i = 0; i < N - 2; ++i)
    for (int j = 0; j < N - 2; ++j) {
      CHECK((X * X)(i, j) == doctest::Approx(X2(i, j)).epsilon(1e-13));
      CHECK((D * D)(i, j) == doctest::Approx(D2(i, j)).epsilon(1e-13));
    }
  // harmonic oscillator -d2 + x2 has eigenvalues 2p + 1, exactly
  const Eigen::MatrixXd Hm = X2 - D2;
  for (int p = 0; p < N; ++p)
    CHECK(Hm(p, p) == doctest::Approx(2 * p + 1).epsilon(1e-13));
}

TEST_CASE("twisted eigenbasis: degenerate levels sit at (2n+1)|lambda|") {
  for (double lam : {0.5, -1.0, 3.0}) {
    const auto b = spectral::build_eigenbasis(lam, 24);
    const auto lv = spectral::degenerate_levels(b.eigenvalues());
    REQUIRE(lv.size() >= 12);
    for (int n = 0; n < 12; ++n)
      CHECK(lv[n] == doctest::Approx((2 * n + 1) * std::abs(lam)).epsilon(1e-8));
    CHECK(b.orthogonality_defect() < 1e-10);
  }
}

TEST_CASE("degenerate_levels skips isolated values") {
  const std::vector<double> ev{1, 1, 1.5, 3, 3, 3, 4.2, 5, 5 + 1e-12};
  const auto lv = spectral::degenerate_levels(ev);
  REQUIRE(lv.size() == 3);
  CHECK(lv[0] == 1);
  CHECK(lv[1] == 3);
  CHECK(lv[2] == 5);
}

TEST_CASE("eigenbasis cache round trip is bitwise") {
  const auto b = spectral::build_eigenbasis(0.75, 8);
  const auto dir = std::filesystem::temp_directory_path() / "hrqhd_unit_cache";
  std::filesystem::create_directories(dir);
  const auto path = (dir / spectral::eigenbasis_cache_name(0.75, 8, spectral::natural_scale(0.75))).string();
  spectral::save_eigenbasis(path, b);
  const auto c = spectral::load_eigenbasis(path, spectral::natural_scale(0.75));
  CHECK(c.eigenvalues() == b.eigenvalues());
  std::filesystem::remove_all(dir);
}

TEST_CASE("group Fourier transform: Plancherel and round trip on a Gaussian") {
  const Grid3 g(48, 48, 32, 7.0, 7.0, 7.0);
  const spectral::GroupFourier gf(g, 20);
  const oracle::Gaussian G{1.1, 1.0};
  const auto u = ScalarField::from_function(g, [&](double x, double y, double t) { return G.value(x, y, t); });
  const auto c = gf.forward(u);
  CHECK(std::abs(c.squared_norm() / (l2_norm(u) * l2_norm(u)) - 1) < 1e-6);
  const auto v = gf.inverse_real(c);
  CHECK(l2_norm(v - u) / l2_norm(u) < 1e-6);
  CHECK(spectral::plancherel_defect(u, gf) < 1e-6);
}

TEST_CASE("group Fourier multiplier by a^2 is minus the sub-Laplacian") {
  // the radial mode has a closed-form sub-Laplacian
  const Grid3 g(64, 64, 32, 8.0, 8.0, 8.0);
  const spectral::GroupFourier gf(g, 28);
  const oracle::RadialMode R{1.2, 2 * std::numbers::pi / 8.0};
  const auto u = ScalarField::from_function(g, [&](double x, double y, double t) { return R.value(x, y, t); });
  const auto Lu = ScalarField::from_function(g, [&](double x, double y, double t) { return R.lap(x, y, t); });
  const auto mLu = gf.inverse_real(gf.multiply(gf.forward(u), [](double a2) { return -a2; }));
  CHECK(l2_norm(mLu - Lu) / l2_norm(Lu) < 1e-4);
}
