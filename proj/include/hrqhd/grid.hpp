#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace hrqhd {

using cplx = std::complex<double>;

/// Box [-Lx,Lx] x [-Ly,Ly] x [-Ltau,Ltau]. x and y are cell-centred,
/// tau is periodic with nodes tau_k = -Ltau + k*htau.
struct Grid3 {
  int nx = 0, ny = 0, ntau = 0;
  double Lx = 0.0, Ly = 0.0, Ltau = 0.0;

  Grid3() = default;
  Grid3(int nx, int ny, int ntau, double Lx, double Ly, double Ltau);

  double hx() const { return 2.0 * Lx / nx; }
  double hy() const { return 2.0 * Ly / ny; }
  double htau() const { return 2.0 * Ltau / ntau; }
  double x(int i) const { return -Lx + (i + 0.5) * hx(); }
  double y(int j) const { return -Ly + (j + 0.5) * hy(); }
  double tau(int k) const { return -Ltau + k * htau(); }
  double cell_volume() const { return hx() * hy() * htau(); }
  std::size_t size() const { return std::size_t(nx) * ny * ntau; }
  std::size_t index(int i, int j, int k) const { return (std::size_t(i) * ny + j) * ntau + k; }

  bool operator==(const Grid3 &o) const = default;
};

template <class T> class BasicField {
public:
  using value_type = T;

  BasicField() = default;
  explicit BasicField(const Grid3 &g, T fill = T{}) : m_grid(g), m_values(g.size(), fill) {}
  BasicField(const Grid3 &g, std::vector<T> values);

  static BasicField from_function(const Grid3 &g, const std::function<T(double, double, double)> &f);

  const Grid3 &grid() const { return m_grid; }
  std::size_t size() const { return m_values.size(); }
  T *data() { return m_values.data(); }
  const T *data() const { return m_values.data(); }
  std::vector<T> &values() { return m_values; }
  const std::vector<T> &values() const { return m_values; }
  T &operator[](std::size_t n) { return m_values[n]; }
  const T &operator[](std::size_t n) const { return m_values[n]; }
  T &at(int i, int j, int k) { return m_values[m_grid.index(i, j, k)]; }
  const T &at(int i, int j, int k) const { return m_values[m_grid.index(i, j, k)]; }

  BasicField &operator+=(const BasicField &o);
  BasicField &operator-=(const BasicField &o);
  BasicField &operator*=(const BasicField &o);
  BasicField &operator*=(T s);
  BasicField &operator+=(T s);

private:
  Grid3 m_grid;
  std::vector<T> m_values;
};

using ScalarField = BasicField<double>;
using ComplexField = BasicField<cplx>;

template <class T> BasicField<T> operator+(BasicField<T> a, const BasicField<T> &b) { return a += b; }
template <class T> BasicField<T> operator-(BasicField<T> a, const BasicField<T> &b) { return a -= b; }
template <class T> BasicField<T> operator*(BasicField<T> a, const BasicField<T> &b) { return a *= b; }
template <class T> BasicField<T> operator*(T s, BasicField<T> a) { return a *= s; }
template <class T> BasicField<T> operator*(BasicField<T> a, T s) { return a *= s; }
template <class T> BasicField<T> operator-(BasicField<T> a) { return a *= T(-1); }

/// Pair of X and Y components.
struct HorizontalField {
  ScalarField a;
  ScalarField b;
};

/// Applies f pointwise.
ScalarField map(const ScalarField &u, const std::function<double(double)> &f);

/// L2 norm with the cell quadrature: midpoint in x,y, trapezoid (exact for
/// bandlimited data) in the periodic tau direction.
double l2_norm(const ScalarField &u);
double l2_norm(const ComplexField &u);
double l2_norm(const HorizontalField &F);
double inner(const ScalarField &u, const ScalarField &v);
double lq_norm(const ScalarField &u, double q);
double max_abs(const ScalarField &u);
double max_abs(const ComplexField &u);
double min_value(const ScalarField &u);
double max_value(const ScalarField &u);
double mean(const ScalarField &u);

/// Nodes farther than `shell` points from the x and y edges.
struct InteriorRange {
  int i0, i1, j0, j1;
};
InteriorRange interior(const Grid3 &g, int shell);
double max_abs_interior(const ScalarField &u, int shell);
double l2_norm_interior(const ScalarField &u, int shell);

/// Largest |u - far| on the boundary shell.
double shell_max_deviation(const ScalarField &u, int shell, double far);
/// Mean over the boundary shell.
double shell_mean(const ScalarField &u, int shell);

} // namespace hrqhd
