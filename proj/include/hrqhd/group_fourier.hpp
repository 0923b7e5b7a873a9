#pragma once

#include "hrqhd/grid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace hrqhd::spectral {

/// Eigenbasis of the lambda-twisted Laplacian
///   -(dx^2 + dy^2) + (lambda^2/4)(x^2 + y^2) - i lambda (x dy - y dx)
/// in the Hermite tensor frame h_p(x/s) h_q(y/s)/s, frame index p*N + q.
///
/// The diagonal phase U = diag(i^p) turns the Hermitian frame matrix into a
/// real symmetric one, so eigenvectors are stored as real orthogonal blocks
/// of U^H A U. Blocks are the connected components of the sparsity pattern.
class TwistedEigenbasis {
public:
  struct Block {
    std::vector<int> frame;  // frame indices in this block
    std::vector<int> slot;   // global sorted eigen index of each column
    Eigen::MatrixXd Q;       // columns are eigenvectors
  };

  TwistedEigenbasis() = default;

  bool central_plane() const { return m_central; }
  double lambda() const { return m_lambda; }
  int n_herm() const { return m_N; }
  double scale() const { return m_scale; }
  /// Ascending; a^2 of each eigen slot.
  const std::vector<double> &eigenvalues() const { return m_eigenvalues; }
  const std::vector<Block> &blocks() const { return *m_blocks; }

  /// Frame coefficients -> eigen coefficients, both of length N^2.
  void to_eigen(const cplx *frame, cplx *eig) const;
  void to_frame(const cplx *eig, cplx *frame) const;

  /// Dense N^2 x N^2 orthogonal matrix in the phased frame; column k belongs to eigenvalue k.
  Eigen::MatrixXd dense_eigenvectors() const;
  /// max |Q^T Q - I|.
  double orthogonality_defect() const;

  static TwistedEigenbasis central(int N);
  static TwistedEigenbasis from_dense(double lambda, int N, double scale, const std::vector<double> &eigenvalues,
                                      const Eigen::MatrixXd &Q);

private:
  friend TwistedEigenbasis build_eigenbasis(double, int, double, bool);
  friend class GroupFourier;

  bool m_central = false;
  double m_lambda = 0.0;
  int m_N = 0;
  double m_scale = 1.0;
  bool m_mirror = false; // lambda < 0: eigenvectors are P Q(|lambda|), P = diag((-1)^p)
  std::vector<double> m_eigenvalues;
  std::shared_ptr<const std::vector<Block>> m_blocks;
};

/// Natural frame scale sqrt(2/|lambda|), at which the twisted operator is
/// diagonal by total Hermite degree.
double natural_scale(double lambda);

/// lambda == 0 returns the central-plane flag basis.
TwistedEigenbasis build_eigenbasis(double lambda, int N);
/// Explicit frame scale. drop_angular keeps only the real part of the
/// operator (used for the tau Nyquist mode of real fields).
TwistedEigenbasis build_eigenbasis(double lambda, int N, double scale, bool drop_angular = false);

/// Degenerate levels of an ascending spectrum: runs of at least two values
/// within rel_tol of the run's first value. Truncation leaves isolated
/// spurious values between the levels; those are skipped.
std::vector<double> degenerate_levels(const std::vector<double> &ascending, double rel_tol = 1e-8);

/// Cache file layout: "HTWB1", f64 lambda, u32 N, f64[N^2] eigenvalues,
/// f64[N^4] eigenvectors (column-major, phased frame), little-endian.
void save_eigenbasis(const std::string &path, const TwistedEigenbasis &b);
TwistedEigenbasis load_eigenbasis(const std::string &path, double scale);
std::string eigenbasis_cache_name(double lambda, int N, double scale);

/// Per-lambda coefficients of a field. Twisted slots hold N^2 eigen
/// coefficients; the lambda = 0 slot holds nx*ny unitary 2-D Fourier
/// coefficients in FFT order.
struct SpectralCoeffs {
  Grid3 grid;
  int n_herm = 0;
  std::vector<double> lambdas;
  std::vector<std::vector<cplx>> coeffs;

  SpectralCoeffs &operator+=(const SpectralCoeffs &o);
  SpectralCoeffs &operator*=(double s);
  /// Sum of |c|^2 over all slots (equals ||u||^2 on the span).
  double squared_norm() const;
};

struct FourierOptions {
  /// Frame scale: natural scale clamped to the band the grid supports.
  bool adaptive_scale = true;
  double fixed_scale = 1.0;
  /// Box padding beyond the last turning point, in units of the scale.
  double padding = 1.5;
  /// Fraction of the grid Nyquist wavenumber the top Hermite function may use.
  double resolution = 0.8;
  std::string cache_dir;
};

/// Group Fourier transform on a Grid3: FFT in tau, then per-lambda projection
/// onto a discretely orthonormalised Hermite frame and rotation into the
/// twisted eigenbasis. The lambda = 0 slot is a periodic 2-D FFT in x, y.
class GroupFourier {
public:
  GroupFourier(const Grid3 &g, int N, FourierOptions opts = {});
  ~GroupFourier();
  GroupFourier(const GroupFourier &) = delete;
  GroupFourier &operator=(const GroupFourier &) = delete;

  const Grid3 &grid() const { return m_grid; }
  int n_herm() const { return m_N; }
  int slot_count() const { return m_grid.ntau; }
  double lambda(int slot) const { return m_lambdas[slot]; }
  const std::vector<double> &lambdas() const { return m_lambdas; }
  bool is_central(int slot) const { return slot == 0; }
  bool is_nyquist(int slot) const { return 2 * slot == m_grid.ntau; }
  double scale(int slot) const;
  /// Admissible frame-scale band [lo, hi] for this grid.
  double scale_lo() const { return m_scale_lo; }
  double scale_hi() const { return m_scale_hi; }
  const TwistedEigenbasis &basis(int slot) const;
  /// a^2 per coefficient of a slot.
  const std::vector<double> &a2(int slot) const { return m_a2[slot]; }
  /// Largest deviation of any sampled frame Gram matrix from identity before orthonormalisation.
  double max_gram_defect() const { return m_gram_defect; }

  SpectralCoeffs forward(const ScalarField &u) const;
  SpectralCoeffs forward(const ComplexField &u) const;
  ComplexField inverse(const SpectralCoeffs &c) const;
  /// Real part of the inverse; exact for coefficients of real fields.
  ScalarField inverse_real(const SpectralCoeffs &c) const;
  SpectralCoeffs zeros() const;

  /// Multiplies each coefficient by f(a^2).
  template <class F> SpectralCoeffs multiply(const SpectralCoeffs &c, F &&f) const {
    SpectralCoeffs r = c;
    for (int s = 0; s < slot_count(); ++s)
      for (std::size_t n = 0; n < r.coeffs[s].size(); ++n)
        r.coeffs[s][n] *= f(m_a2[s][n]);
    return r;
  }

private:
  struct Frame;
  const Frame &frame_for(double scale);
  void project(const cplx *plane, const Frame &F, cplx *out) const;
  void synthesize(const cplx *coef, const Frame &F, cplx *plane) const;
  void slot_forward(int s, const cplx *plane, cplx *out) const;
  void slot_inverse(int s, const cplx *coef, cplx *plane) const;

  Grid3 m_grid;
  int m_N;
  FourierOptions m_opts;
  double m_scale_lo = 0.0, m_scale_hi = 0.0, m_gram_defect = 0.0;
  std::vector<double> m_lambdas;
  std::vector<std::unique_ptr<Frame>> m_frames;
  std::vector<const Frame *> m_slot_frame;
  std::vector<std::shared_ptr<const TwistedEigenbasis>> m_bases;
  std::vector<std::vector<double>> m_a2;
};

/// Relative deviation of the discrete Parseval identity.
double plancherel_defect(const ScalarField &u, const GroupFourier &gf);
/// ||u|| + (sum a^(2k) |c|^2)^(1/2).
double spectral_sobolev_norm(const ScalarField &u, double k, const GroupFourier &gf);

} // namespace hrqhd::spectral
