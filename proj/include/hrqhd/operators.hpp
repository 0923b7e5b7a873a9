#pragma once

#include "hrqhd/grid.hpp"

#include <vector>

namespace hrqhd::geom {

/// Finite-difference weights for the m-th derivative at x0 on the given nodes.
std::vector<double> fornberg_weights(int m, double x0, const std::vector<double> &nodes);

/// First-derivative matrix on n uniform points: centred of even order p in the
/// interior, one-sided closures of the same order near the ends.
class Stencil1D {
public:
  Stencil1D() = default;
  Stencil1D(int n, double h, int order);

  int size() const { return m_n; }
  int width() const { return m_order + 1; }
  int start(int i) const { return m_start[i]; }
  const double *weights(int i) const { return &m_weights[std::size_t(i) * width()]; }

private:
  int m_n = 0;
  int m_order = 0;
  std::vector<int> m_start;
  std::vector<double> m_weights;
};

/// Discrete left-invariant calculus on a Grid3: X = dx - (y/2) dtau,
/// Y = dy + (x/2) dtau, dtau spectral, dx and dy by finite differences.
class HeisenbergCalculus {
public:
  explicit HeisenbergCalculus(const Grid3 &g, int fd_order = 4);

  const Grid3 &grid() const { return m_grid; }
  int fd_order() const { return m_order; }
  /// Boundary shell excluded from assertions: three half-stencil widths.
  int shell() const { return 3 * (m_order / 2); }

  ScalarField dx(const ScalarField &u) const;
  ScalarField dy(const ScalarField &u) const;
  ScalarField dtau(const ScalarField &u) const;
  ComplexField dx(const ComplexField &u) const;
  ComplexField dy(const ComplexField &u) const;
  ComplexField dtau(const ComplexField &u) const;

  ScalarField X(const ScalarField &u) const;
  ScalarField Y(const ScalarField &u) const;
  ComplexField X(const ComplexField &u) const;
  ComplexField Y(const ComplexField &u) const;

  /// Transposes with respect to the uniform grid inner product.
  ScalarField X_transpose(const ScalarField &u) const;
  ScalarField Y_transpose(const ScalarField &u) const;

  ScalarField sub_laplacian(const ScalarField &u) const;
  ComplexField sub_laplacian(const ComplexField &u) const;
  HorizontalField gradient(const ScalarField &u) const;
  ScalarField divergence(const HorizontalField &F) const;

  const Stencil1D &stencil_x() const { return m_sx; }
  const Stencil1D &stencil_y() const { return m_sy; }

private:
  template <class T> BasicField<T> apply_x(const BasicField<T> &u, bool transpose) const;
  template <class T> BasicField<T> apply_y(const BasicField<T> &u, bool transpose) const;
  template <class T> BasicField<T> combine(const BasicField<T> &d, const BasicField<T> &t, bool x_field, double sign) const;

  Grid3 m_grid;
  int m_order;
  Stencil1D m_sx, m_sy;
  std::vector<double> m_lambda; // tau wavenumbers, Nyquist zeroed
};

/// Shared calculus instance for (grid, order); built on first use.
const HeisenbergCalculus &calculus_for(const Grid3 &g, int fd_order = 4);

ScalarField apply_X(const ScalarField &u, int fd_order = 4);
ScalarField apply_Y(const ScalarField &u, int fd_order = 4);
ScalarField apply_dtau(const ScalarField &u);
ScalarField sub_laplacian(const ScalarField &u, int fd_order = 4);
HorizontalField horizontal_gradient(const ScalarField &u, int fd_order = 4);
ScalarField horizontal_divergence(const HorizontalField &F, int fd_order = 4);
/// (a, b) -> (b, -a), so that J(X) = -Y and J(Y) = X.
HorizontalField apply_J(const HorizontalField &F);

/// Max over interior nodes of |(XY - YX - dtau) u|.
double commutator_defect(const ScalarField &u, int fd_order = 4);

/// Word-based norm: sum over j <= k of (sum over words w of length j of ||w u||^2)^(1/2).
double sobolev_norm(const ScalarField &u, int k, const HeisenbergCalculus &calc);
double sobolev_norm(const ScalarField &u, int k);

struct GnResult {
  double lhs;
  double rhs;
  double theta;
};
/// Gagliardo-Nirenberg diagnostic with theta = 2(q-2)/q, 2 <= q <= 4.
GnResult gn_check(const ScalarField &u, double q, int fd_order = 4);

} // namespace hrqhd::geom
