#include "hrqhd/grid.hpp"

#include "hrqhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hrqhd {

Grid3::Grid3(int nx_, int ny_, int ntau_, double Lx_, double Ly_, double Ltau_)
    : nx(nx_), ny(ny_), ntau(ntau_), Lx(Lx_), Ly(Ly_), Ltau(Ltau_) {
  if (nx < 1 || ny < 1 || ntau < 1)
    throw ConfigError("grid: sample counts must be positive");
  if (ntau % 2 != 0 || ntau < 8)
    throw ConfigError("grid.ntau: must be even and >= 8, got " + std::to_string(ntau));
  if (!(Lx > 0) || !(Ly > 0) || !(Ltau > 0))
    throw ConfigError("grid: half-extents must be positive");
}

template <class T> BasicField<T>::BasicField(const Grid3 &g, std::vector<T> values) : m_grid(g), m_values(std::move(values)) {
  if (m_values.size() != g.size())
    throw PreconditionError("field: value count does not match grid");
}

template <class T>
BasicField<T> BasicField<T>::from_function(const Grid3 &g, const std::function<T(double, double, double)> &f) {
  BasicField<T> u(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.ntau; ++k)
        u.at(i, j, k) = f(g.x(i), g.y(j), g.tau(k));
  return u;
}

template <class T> BasicField<T> &BasicField<T>::operator+=(const BasicField &o) {
  for (std::size_t n = 0; n < m_values.size(); ++n)
    m_values[n] += o.m_values[n];
  return *this;
}
template <class T> BasicField<T> &BasicField<T>::operator-=(const BasicField &o) {
  for (std::size_t n = 0; n < m_values.size(); ++n)
    m_values[n] -= o.m_values[n];
  return *this;
}
template <class T> BasicField<T> &BasicField<T>::operator*=(const BasicField &o) {
  for (std::size_t n = 0; n < m_values.size(); ++n)
    m_values[n] *= o.m_values[n];
  return *this;
}
template <class T> BasicField<T> &BasicField<T>::operator*=(T s) {
  for (auto &v : m_values)
    v *= s;
  return *this;
}
template <class T> BasicField<T> &BasicField<T>::operator+=(T s) {
  for (auto &v : m_values)
    v += s;
  return *this;
}

template class BasicField<double>;
template class BasicField<cplx>;

ScalarField map(const ScalarField &u, const std::function<double(double)> &f) {
  ScalarField r(u.grid());
  for (std::size_t n = 0; n < u.size(); ++n)
    r[n] = f(u[n]);
  return r;
}

double l2_norm(const ScalarField &u) {
  double s = 0.0;
  for (double v : u.values())
    s += v * v;
  return std::sqrt(s * u.grid().cell_volume());
}

double l2_norm(const ComplexField &u) {
  double s = 0.0;
  for (const cplx &v : u.values())
    s += std::norm(v);
  return std::sqrt(s * u.grid().cell_volume());
}

double l2_norm(const HorizontalField &F) { return std::hypot(l2_norm(F.a), l2_norm(F.b)); }

double inner(const ScalarField &u, const ScalarField &v) {
  double s = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    s += u[n] * v[n];
  return s * u.grid().cell_volume();
}

double lq_norm(const ScalarField &u, double q) {
  double s = 0.0;
  for (double v : u.values())
    s += std::pow(std::abs(v), q);
  return std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

double max_abs(const ScalarField &u) {
  double m = 0.0;
  for (double v : u.values())
    m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const ComplexField &u) {
  double m = 0.0;
  for (const cplx &v : u.values())
    m = std::max(m, std::abs(v));
  return m;
}

double min_value(const ScalarField &u) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : u.values())
    m = std::min(m, v);
  return m;
}

double max_value(const ScalarField &u) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : u.values())
    m = std::max(m, v);
  return m;
}

double mean(const ScalarField &u) {
  double s = 0.0;
  for (double v : u.values())
    s += v;
  return s / double(u.size());
}

InteriorRange interior(const Grid3 &g, int shell) {
  InteriorRange r{shell, g.nx - shell, shell, g.ny - shell};
  if (r.i0 >= r.i1 || r.j0 >= r.j1)
    throw PreconditionError("grid has no interior for boundary shell " + std::to_string(shell));
  return r;
}

double max_abs_interior(const ScalarField &u, int shell) {
  const Grid3 &g = u.grid();
  const InteriorRange r = interior(g, shell);
  double m = 0.0;
  for (int i = r.i0; i < r.i1; ++i)
    for (int j = r.j0; j < r.j1; ++j)
      for (int k = 0; k < g.ntau; ++k)
        m = std::max(m, std::abs(u.at(i, j, k)));
  return m;
}

double l2_norm_interior(const ScalarField &u, int shell) {
  const Grid3 &g = u.grid();
  const InteriorRange r = interior(g, shell);
  double s = 0.0;
  for (int i = r.i0; i < r.i1; ++i)
    for (int j = r.j0; j < r.j1; ++j)
      for (int k = 0; k < g.ntau; ++k)
        s += u.at(i, j, k) * u.at(i, j, k);
  return std::sqrt(s * g.cell_volume());
}

namespace {
template <class F> void for_shell(const Grid3 &g, int shell, F &&f) {
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if (i >= shell && i < g.nx - shell && j >= shell && j < g.ny - shell)
        continue;
      for (int k = 0; k < g.ntau; ++k)
        f(g.index(i, j, k));
    }
}
} // namespace

double shell_max_deviation(const ScalarField &u, int shell, double far) {
  double m = 0.0;
  for_shell(u.grid(), shell, [&](std::size_t n) { m = std::max(m, std::abs(u[n] - far)); });
  return m;
}

double shell_mean(const ScalarField &u, int shell) {
  double s = 0.0;
  std::size_t c = 0;
  for_shell(u.grid(), shell, [&](std::size_t n) {
    s += u[n];
    ++c;
  });
  return c ? s / double(c) : 0.0;
}

} // namespace hrqhd
