#include "hrqhd/operators.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace hrqhd::geom {

std::vector<double> fornberg_weights(int m, double x0, const std::vector<double> &nodes) {
  const int n = int(nodes.size());
  std::vector<std::vector<double>> C(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  C[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
        C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
      C[j][0] = c4 * C[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = C[i][m];
  return w;
}

Stencil1D::Stencil1D(int n, double h, int order) : m_n(n), m_order(order) {
  if (order < 2 || order > 8 || order % 2 != 0)
    throw ConfigError("solver.fd_order: must be one of 2, 4, 6, 8, got " + std::to_string(order));
  if (n < order + 3)
    throw ConfigError("grid: " + std::to_string(n) + " points is too small for a stencil of order " +
                      std::to_string(order) + " (need at least " + std::to_string(order + 3) + ")");
  const int w = order + 1;
  const int half = order / 2;
  m_start.resize(n);
  m_weights.resize(std::size_t(n) * w);
  std::vector<double> nodes(w);
  for (int i = 0; i < n; ++i) {
    const int s = std::clamp(i - half, 0, n - w);
    m_start[i] = s;
    for (int q = 0; q < w; ++q)
      nodes[q] = double(s + q);
    auto wt = fornberg_weights(1, double(i), nodes);
    for (int q = 0; q < w; ++q)
      m_weights[std::size_t(i) * w + q] = wt[q] / h;
  }
}

HeisenbergCalculus::HeisenbergCalculus(const Grid3 &g, int fd_order)
    : m_grid(g), m_order(fd_order), m_sx(g.nx, g.hx(), fd_order), m_sy(g.ny, g.hy(), fd_order) {
  m_lambda.resize(g.ntau);
  for (int m = 0; m < g.ntau; ++m) {
    const int s = fft::signed_bin(m, g.ntau);
    m_lambda[m] = (2 * m == g.ntau) ? 0.0 : std::numbers::pi * s / g.Ltau;
  }
}

template <class T> BasicField<T> HeisenbergCalculus::apply_x(const BasicField<T> &u, bool transpose) const {
  const Grid3 &g = m_grid;
  BasicField<T> out(g);
  const std::size_t block = std::size_t(g.ny) * g.ntau;
  const int w = m_sx.width();
  for (int i = 0; i < g.nx; ++i) {
    const double *wt = m_sx.weights(i);
    const int s = m_sx.start(i);
    for (int q = 0; q < w; ++q) {
      const double c = wt[q];
      const int src = transpose ? i : s + q;
      const int dst = transpose ? s + q : i;
      const T *a = u.data() + std::size_t(src) * block;
      T *o = out.data() + std::size_t(dst) * block;
      for (std::size_t n = 0; n < block; ++n)
        o[n] += c * a[n];
    }
  }
  return out;
}

template <class T> BasicField<T> HeisenbergCalculus::apply_y(const BasicField<T> &u, bool transpose) const {
  const Grid3 &g = m_grid;
  BasicField<T> out(g);
  const int w = m_sy.width();
  const std::size_t nt = g.ntau;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double *wt = m_sy.weights(j);
      const int s = m_sy.start(j);
      for (int q = 0; q < w; ++q) {
        const double c = wt[q];
        const int src = transpose ? j : s + q;
        const int dst = transpose ? s + q : j;
        const T *a = u.data() + g.index(i, src, 0);
        T *o = out.data() + g.index(i, dst, 0);
        for (std::size_t n = 0; n < nt; ++n)
          o[n] += c * a[n];
      }
    }
  return out;
}

ScalarField HeisenbergCalculus::dx(const ScalarField &u) const { return apply_x(u, false); }
ScalarField HeisenbergCalculus::dy(const ScalarField &u) const { return apply_y(u, false); }
ComplexField HeisenbergCalculus::dx(const ComplexField &u) const { return apply_x(u, false); }
ComplexField HeisenbergCalculus::dy(const ComplexField &u) const { return apply_y(u, false); }

ScalarField HeisenbergCalculus::dtau(const ScalarField &u) const {
  const Grid3 &g = m_grid;
  const int n = g.ntau, nc = n / 2 + 1, lines = g.nx * g.ny;
  std::vector<cplx> spec(std::size_t(nc) * lines);
  fft::r2c_lines(u.data(), spec.data(), n, lines);
  const double inv = 1.0 / n;
  for (int l = 0; l < lines; ++l)
    for (int m = 0; m < nc; ++m)
      spec[std::size_t(l) * nc + m] *= cplx(0.0, m_lambda[m] * inv);
  ScalarField out(g);
  fft::c2r_lines(spec.data(), out.data(), n, lines);
  return out;
}

ComplexField HeisenbergCalculus::dtau(const ComplexField &u) const {
  const Grid3 &g = m_grid;
  const int n = g.ntau, lines = g.nx * g.ny;
  std::vector<cplx> spec(u.size());
  fft::c2c_lines(u.data(), spec.data(), n, lines, -1);
  const double inv = 1.0 / n;
  for (int l = 0; l < lines; ++l)
    for (int m = 0; m < n; ++m)
      spec[std::size_t(l) * n + m] *= cplx(0.0, m_lambda[m] * inv);
  ComplexField out(g);
  fft::c2c_lines(spec.data(), out.data(), n, lines, +1);
  return out;
}

// d + sign * (coord/2) * t, coord = y for X (sign -1) and x for Y (sign +1)
template <class T>
BasicField<T> HeisenbergCalculus::combine(const BasicField<T> &d, const BasicField<T> &t, bool x_field, double sign) const {
  const Grid3 &g = m_grid;
  BasicField<T> out = d;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double c = sign * 0.5 * (x_field ? g.y(j) : g.x(i));
      T *o = out.data() + g.index(i, j, 0);
      const T *a = t.data() + g.index(i, j, 0);
      for (int k = 0; k < g.ntau; ++k)
        o[k] += c * a[k];
    }
  return out;
}

ScalarField HeisenbergCalculus::X(const ScalarField &u) const { return combine(dx(u), dtau(u), true, -1.0); }
ScalarField HeisenbergCalculus::Y(const ScalarField &u) const { return combine(dy(u), dtau(u), false, +1.0); }
ComplexField HeisenbergCalculus::X(const ComplexField &u) const { return combine(dx(u), dtau(u), true, -1.0); }
ComplexField HeisenbergCalculus::Y(const ComplexField &u) const { return combine(dy(u), dtau(u), false, +1.0); }

ScalarField HeisenbergCalculus::X_transpose(const ScalarField &u) const {
  return combine(apply_x(u, true), dtau(u), true, +1.0);
}
ScalarField HeisenbergCalculus::Y_transpose(const ScalarField &u) const {
  return combine(apply_y(u, true), dtau(u), false, -1.0);
}

ScalarField HeisenbergCalculus::sub_laplacian(const ScalarField &u) const { return X(X(u)) + Y(Y(u)); }
ComplexField HeisenbergCalculus::sub_laplacian(const ComplexField &u) const { return X(X(u)) + Y(Y(u)); }

HorizontalField HeisenbergCalculus::gradient(const ScalarField &u) const { return {X(u), Y(u)}; }

ScalarField HeisenbergCalculus::divergence(const HorizontalField &F) const { return X(F.a) + Y(F.b); }

const HeisenbergCalculus &calculus_for(const Grid3 &g, int fd_order) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, double, double, double, int>, std::unique_ptr<HeisenbergCalculus>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(g.nx, g.ny, g.ntau, g.Lx, g.Ly, g.Ltau, fd_order);
  auto &slot = cache[key];
  if (!slot)
    slot = std::make_unique<HeisenbergCalculus>(g, fd_order);
  return *slot;
}

ScalarField apply_X(const ScalarField &u, int fd_order) { return calculus_for(u.grid(), fd_order).X(u); }
ScalarField apply_Y(const ScalarField &u, int fd_order) { return calculus_for(u.grid(), fd_order).Y(u); }
ScalarField apply_dtau(const ScalarField &u) { return calculus_for(u.grid()).dtau(u); }
ScalarField sub_laplacian(const ScalarField &u, int fd_order) { return calculus_for(u.grid(), fd_order).sub_laplacian(u); }
HorizontalField horizontal_gradient(const ScalarField &u, int fd_order) {
  return calculus_for(u.grid(), fd_order).gradient(u);
}
ScalarField horizontal_divergence(const HorizontalField &F, int fd_order) {
  return calculus_for(F.a.grid(), fd_order).divergence(F);
}

HorizontalField apply_J(const HorizontalField &F) { return {F.b, -F.a}; }

double commutator_defect(const ScalarField &u, int fd_order) {
  const auto &c = calculus_for(u.grid(), fd_order);
  ScalarField d = c.X(c.Y(u)) - c.Y(c.X(u)) - c.dtau(u);
  return max_abs_interior(d, c.shell());
}

namespace {
void accumulate_words(const ScalarField &w, int depth, int k, const HeisenbergCalculus &calc, std::vector<double> &sq) {
  const double n = l2_norm(w);
  sq[depth] += n * n;
  if (depth == k)
    return;
  accumulate_words(calc.X(w), depth + 1, k, calc, sq);
  accumulate_words(calc.Y(w), depth + 1, k, calc, sq);
}
} // namespace

double sobolev_norm(const ScalarField &u, int k, const HeisenbergCalculus &calc) {
  if (k < 0 || k > 5)
    throw PreconditionError("sobolev_norm: unsupported order " + std::to_string(k) + " (0..5)");
  std::vector<double> sq(k + 1, 0.0);
  accumulate_words(u, 0, k, calc, sq);
  double s = 0.0;
  for (double v : sq)
    s += std::sqrt(v);
  return s;
}

double sobolev_norm(const ScalarField &u, int k) { return sobolev_norm(u, k, calculus_for(u.grid())); }

GnResult gn_check(const ScalarField &u, double q, int fd_order) {
  if (!(q >= 2.0 && q <= 4.0))
    throw PreconditionError("gn_check: q must lie in [2, 4]");
  const double theta = 2.0 * (q - 2.0) / q;
  const double grad = l2_norm(horizontal_gradient(u, fd_order));
  const double l2 = l2_norm(u);
  const double rhs = (theta == 0.0 ? 1.0 : std::pow(grad, theta)) * (theta == 1.0 ? 1.0 : std::pow(l2, 1.0 - theta));
  return {lq_norm(u, q), rhs, theta};
}

} // namespace hrqhd::geom
