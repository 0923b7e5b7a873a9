#include "hrqhd/group_fourier.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/fft.hpp"
#include "hrqhd/hermite.hpp"
#include "hrqhd/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hrqhd::spectral {

namespace {

// (-i)^p, or i^p for the mirrored basis.
cplx frame_phase(int p, bool mirror) {
  static const cplx pw[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const int r = p & 3;
  return mirror ? std::conj(pw[r]) : pw[r];
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a)
      a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
};

// Groups indices by component; components ordered by smallest member.
std::vector<std::vector<int>> components(UnionFind &uf, int n) {
  std::vector<int> id(n, -1);
  std::vector<std::vector<int>> comps;
  for (int a = 0; a < n; ++a) {
    const int r = uf.find(a);
    if (id[r] < 0) {
      id[r] = int(comps.size());
      comps.emplace_back();
    }
    comps[id[r]].push_back(a);
  }
  return comps;
}

// Sorts eigenvalues over all blocks and assigns global slots.
void assign_slots(std::vector<TwistedEigenbasis::Block> &blocks, const std::vector<std::vector<double>> &vals,
                  std::vector<double> &sorted) {
  struct Entry {
    double v;
    int b, k;
  };
  std::vector<Entry> all;
  for (int b = 0; b < int(blocks.size()); ++b)
    for (int k = 0; k < int(vals[b].size()); ++k)
      all.push_back({vals[b][k], b, k});
  std::stable_sort(all.begin(), all.end(), [](const Entry &a, const Entry &b) { return a.v < b.v; });
  sorted.resize(all.size());
  for (auto &blk : blocks)
    blk.slot.assign(blk.frame.size(), -1);
  for (int s = 0; s < int(all.size()); ++s) {
    sorted[s] = all[s].v;
    blocks[all[s].b].slot[all[s].k] = s;
  }
}

} // namespace

double natural_scale(double lambda) { return std::sqrt(2.0 / std::abs(lambda)); }

TwistedEigenbasis TwistedEigenbasis::central(int N) {
  TwistedEigenbasis b;
  b.m_central = true;
  b.m_N = N;
  b.m_blocks = std::make_shared<const std::vector<Block>>();
  return b;
}

std::vector<double> degenerate_levels(const std::vector<double> &ev, double rel_tol) {
  std::vector<double> out;
  for (std::size_t i = 0; i < ev.size();) {
    std::size_t j = i + 1;
    while (j < ev.size() && std::abs(ev[j] - ev[i]) <= rel_tol * std::max(1.0, std::abs(ev[i])))
      ++j;
    if (j - i >= 2)
      out.push_back(ev[i]);
    i = j;
  }
  return out;
}

TwistedEigenbasis build_eigenbasis(double lambda, int N) {
  if (lambda == 0.0)
    return TwistedEigenbasis::central(N);
  return build_eigenbasis(lambda, N, natural_scale(lambda));
}

TwistedEigenbasis build_eigenbasis(double lambda, int N, double scale, bool drop_angular) {
  if (N < 2)
    throw PreconditionError("build_eigenbasis: N must be >= 2");
  if (lambda == 0.0)
    return TwistedEigenbasis::central(N);
  if (!(scale > 0))
    throw PreconditionError("build_eigenbasis: frame scale must be positive");

  const double lam = std::abs(lambda);
  const Eigen::MatrixXd Xi = position_matrix(N), D = derivative_matrix(N);
  const Eigen::MatrixXd H1 =
      -derivative_sq_matrix(N) / (scale * scale) + (lam * lam * scale * scale / 4.0) * position_sq_matrix(N);

  // Sparse real symmetric matrix B = U^H A U, U = diag(i^p), for lambda = |lambda|.
  const int n = N * N;
  struct Entry {
    int a, b;
    double v;
  };
  std::vector<Entry> entries;
  double vmax = 0.0;
  auto push = [&](int a, int b, double v) {
    entries.push_back({a, b, v});
    vmax = std::max(vmax, std::abs(v));
  };
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < N; ++q) {
      const int a = p * N + q;
      push(a, a, H1(p, p) + H1(q, q));
      for (int d : {-2, 2}) {
        if (p + d >= 0 && p + d < N)
          push(a, (p + d) * N + q, -H1(p, p + d)); // i^{+-2} = -1
        if (q + d >= 0 && q + d < N)
          push(a, p * N + q + d, H1(q, q + d));
      }
      if (drop_angular)
        continue;
      for (int dp : {-1, 1})
        for (int dq : {-1, 1}) {
          const int pp = p + dp, qq = q + dq;
          if (pp < 0 || pp >= N || qq < 0 || qq >= N)
            continue;
          push(a, pp * N + qq, lam * dp * (Xi(p, pp) * D(q, qq) - D(p, pp) * Xi(q, qq)));
        }
    }
  const double cut = 1e-14 * vmax;
  UnionFind uf(n);
  for (const auto &e : entries)
    if (std::abs(e.v) > cut)
      uf.unite(e.a, e.b);
  auto comps = components(uf, n);
  std::vector<int> where(n), local(n);
  for (int c = 0; c < int(comps.size()); ++c)
    for (int l = 0; l < int(comps[c].size()); ++l) {
      where[comps[c][l]] = c;
      local[comps[c][l]] = l;
    }
  std::vector<Eigen::MatrixXd> mats(comps.size());
  for (int c = 0; c < int(comps.size()); ++c)
    mats[c] = Eigen::MatrixXd::Zero(comps[c].size(), comps[c].size());
  for (const auto &e : entries)
    if (std::abs(e.v) > cut)
      mats[where[e.a]](local[e.a], local[e.b]) += e.v;

  auto blocks = std::make_shared<std::vector<TwistedEigenbasis::Block>>(comps.size());
  std::vector<std::vector<double>> vals(comps.size());
  for (int c = 0; c < int(comps.size()); ++c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mats[c]);
    if (es.info() != Eigen::Success)
      throw Error("build_eigenbasis: eigensolver failed");
    (*blocks)[c].frame = comps[c];
    (*blocks)[c].Q = es.eigenvectors();
    vals[c].assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  TwistedEigenbasis b;
  b.m_lambda = lambda;
  b.m_N = N;
  b.m_scale = scale;
  b.m_mirror = lambda < 0;
  assign_slots(*blocks, vals, b.m_eigenvalues);
  b.m_blocks = blocks;
  return b;
}

void TwistedEigenbasis::to_eigen(const cplx *frame, cplx *eig) const {
  for (const Block &blk : *m_blocks) {
    const int m = int(blk.frame.size());
    Eigen::MatrixXd W(m, 2);
    for (int l = 0; l < m; ++l) {
      const int f = blk.frame[l];
      const cplx w = frame_phase(f / m_N, m_mirror) * frame[f];
      W(l, 0) = w.real();
      W(l, 1) = w.imag();
    }
    const Eigen::MatrixXd R = blk.Q.transpose() * W;
    for (int k = 0; k < m; ++k)
      eig[blk.slot[k]] = cplx(R(k, 0), R(k, 1));
  }
}

void TwistedEigenbasis::to_frame(const cplx *eig, cplx *frame) const {
  for (const Block &blk : *m_blocks) {
    const int m = int(blk.frame.size());
    Eigen::MatrixXd W(m, 2);
    for (int k = 0; k < m; ++k) {
      W(k, 0) = eig[blk.slot[k]].real();
      W(k, 1) = eig[blk.slot[k]].imag();
    }
    const Eigen::MatrixXd R = blk.Q * W;
    for (int l = 0; l < m; ++l) {
      const int f = blk.frame[l];
      frame[f] = std::conj(frame_phase(f / m_N, m_mirror)) * cplx(R(l, 0), R(l, 1));
    }
  }
}

Eigen::MatrixXd TwistedEigenbasis::dense_eigenvectors() const {
  const int n = m_N * m_N;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (const Block &blk : *m_blocks)
    for (int k = 0; k < int(blk.frame.size()); ++k)
      for (int l = 0; l < int(blk.frame.size()); ++l) {
        const double sign = (m_mirror && ((blk.frame[l] / m_N) & 1)) ? -1.0 : 1.0;
        Q(blk.frame[l], blk.slot[k]) = sign * blk.Q(l, k);
      }
  return Q;
}

double TwistedEigenbasis::orthogonality_defect() const {
  double d = 0.0;
  for (const Block &blk : *m_blocks) {
    const Eigen::MatrixXd G = blk.Q.transpose() * blk.Q - Eigen::MatrixXd::Identity(blk.Q.cols(), blk.Q.cols());
    d = std::max(d, G.cwiseAbs().maxCoeff());
  }
  return d;
}

TwistedEigenbasis TwistedEigenbasis::from_dense(double lambda, int N, double scale, const std::vector<double> &eigenvalues,
                                                const Eigen::MatrixXd &Q) {
  const int n = N * N;
  if (Q.rows() != n || Q.cols() != n || int(eigenvalues.size()) != n)
    throw DecodeError("eigenbasis: inconsistent dimensions");
  UnionFind uf(n);
  for (int k = 0; k < n; ++k) {
    int first = -1;
    for (int f = 0; f < n; ++f)
      if (Q(f, k) != 0.0) {
        if (first < 0)
          first = f;
        else
          uf.unite(first, f);
      }
  }
  auto comps = components(uf, n);
  std::vector<int> where(n);
  for (int c = 0; c < int(comps.size()); ++c)
    for (int f : comps[c])
      where[f] = c;
  auto blocks = std::make_shared<std::vector<TwistedEigenbasis::Block>>(comps.size());
  std::vector<std::vector<int>> cols(comps.size());
  for (int k = 0; k < n; ++k) {
    int f0 = 0;
    while (f0 < n && Q(f0, k) == 0.0)
      ++f0;
    if (f0 == n)
      throw DecodeError("eigenbasis: zero eigenvector");
    cols[where[f0]].push_back(k);
  }
  const bool mirror = lambda < 0;
  for (int c = 0; c < int(comps.size()); ++c) {
    auto &blk = (*blocks)[c];
    blk.frame = comps[c];
    if (cols[c].size() != comps[c].size())
      throw DecodeError("eigenbasis: block structure is not square");
    blk.slot = cols[c];
    blk.Q.resize(comps[c].size(), cols[c].size());
    for (int l = 0; l < int(comps[c].size()); ++l) {
      const double sign = (mirror && ((comps[c][l] / N) & 1)) ? -1.0 : 1.0;
      for (int k = 0; k < int(cols[c].size()); ++k)
        blk.Q(l, k) = sign * Q(comps[c][l], cols[c][k]);
    }
  }
  TwistedEigenbasis b;
  b.m_lambda = lambda;
  b.m_N = N;
  b.m_scale = scale;
  b.m_mirror = mirror;
  b.m_eigenvalues = eigenvalues;
  b.m_blocks = blocks;
  return b;
}

namespace {
template <class T> void put(std::ofstream &os, T v) {
  static_assert(std::endian::native == std::endian::little);
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <class T> T get(std::ifstream &is) {
  T v;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw DecodeError("eigenbasis: truncated file");
  return v;
}
} // namespace

void save_eigenbasis(const std::string &path, const TwistedEigenbasis &b) {
  if (b.central_plane())
    throw PreconditionError("save_eigenbasis: the central plane has no twisted basis");
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error("cannot write " + path);
  os.write("HTWB1", 5);
  put<double>(os, b.lambda());
  put<std::uint32_t>(os, std::uint32_t(b.n_herm()));
  for (double v : b.eigenvalues())
    put<double>(os, v);
  const Eigen::MatrixXd Q = b.dense_eigenvectors();
  os.write(reinterpret_cast<const char *>(Q.data()), std::streamsize(Q.size() * sizeof(double)));
  if (!os)
    throw Error("write failed: " + path);
}

TwistedEigenbasis load_eigenbasis(const std::string &path, double scale) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw DecodeError("cannot open " + path);
  char magic[5];
  if (!is.read(magic, 5) || std::string(magic, 5) != "HTWB1")
    throw DecodeError("eigenbasis: bad magic in " + path);
  const double lambda = get<double>(is);
  const int N = int(get<std::uint32_t>(is));
  if (N < 2 || N > 512)
    throw DecodeError("eigenbasis: implausible N");
  const int n = N * N;
  std::vector<double> ev(n);
  for (auto &v : ev)
    v = get<double>(is);
  Eigen::MatrixXd Q(n, n);
  if (!is.read(reinterpret_cast<char *>(Q.data()), std::streamsize(Q.size() * sizeof(double))))
    throw DecodeError("eigenbasis: truncated eigenvectors");
  return TwistedEigenbasis::from_dense(lambda, N, scale, ev, Q);
}

std::string eigenbasis_cache_name(double lambda, int N, double scale) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "twisted_l%.17g_N%d_s%.17g_v1.htwb", lambda, N, scale);
  return buf;
}

SpectralCoeffs &SpectralCoeffs::operator+=(const SpectralCoeffs &o) {
  for (std::size_t s = 0; s < coeffs.size(); ++s)
    for (std::size_t n = 0; n < coeffs[s].size(); ++n)
      coeffs[s][n] += o.coeffs[s][n];
  return *this;
}

SpectralCoeffs &SpectralCoeffs::operator*=(double f) {
  for (auto &v : coeffs)
    for (auto &c : v)
      c *= f;
  return *this;
}

double SpectralCoeffs::squared_norm() const {
  double s = 0.0;
  for (const auto &v : coeffs)
    for (const auto &c : v)
      s += std::norm(c);
  return s;
}

// Discretely orthonormalised Hermite frame tables for one scale.
struct GroupFourier::Frame {
  double scale;
  Eigen::MatrixXcd Vx, Vy; // rows: nodes, columns: frame functions
  double gram_defect;
};

namespace {
Eigen::MatrixXd orthonormal_frame(int N, double scale, int n, double h, double L, double &defect) {
  std::vector<double> pts(n);
  for (int i = 0; i < n; ++i)
    pts[i] = -L + (i + 0.5) * h;
  Eigen::MatrixXd V = hermite_functions(N, scale, pts) * std::sqrt(h);
  const Eigen::MatrixXd G = V.transpose() * V;
  defect = (G - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd d = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return V * (es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}
} // namespace

GroupFourier::GroupFourier(const Grid3 &g, int N, FourierOptions opts) : m_grid(g), m_N(N), m_opts(std::move(opts)) {
  if (N < 2)
    throw PreconditionError("group transform: N must be >= 2");
  const double turn = std::sqrt(2.0 * N + 1.0);
  const double hmax = std::max(g.hx(), g.hy());
  const double Lmin = std::min(g.Lx, g.Ly);
  m_scale_lo = hmax * turn / (m_opts.resolution * std::numbers::pi);
  m_scale_hi = Lmin / (turn + m_opts.padding);
  auto required = [&](double s) {
    std::ostringstream os;
    os << "insufficient box for N=" << N << ": need Lx, Ly >= " << s * (turn + m_opts.padding)
       << " and spacing <= " << m_opts.resolution * std::numbers::pi * s / turn << " (have Lx=" << g.Lx
       << ", Ly=" << g.Ly << ", h=" << hmax << ")";
    return os.str();
  };
  if (m_opts.adaptive_scale) {
    if (m_scale_lo > m_scale_hi)
      throw PreconditionError(required(m_scale_lo));
  } else if (m_opts.fixed_scale < m_scale_lo * (1 - 1e-12) || m_opts.fixed_scale > m_scale_hi * (1 + 1e-12)) {
    throw PreconditionError(required(m_opts.fixed_scale));
  }

  const int nt = g.ntau;
  m_lambdas.resize(nt);
  for (int m = 0; m < nt; ++m)
    m_lambdas[m] = std::numbers::pi * fft::signed_bin(m, nt) / g.Ltau;

  m_slot_frame.assign(nt, nullptr);
  m_bases.assign(nt, nullptr);
  m_a2.assign(nt, {});

  // central plane
  m_bases[0] = std::make_shared<const TwistedEigenbasis>(TwistedEigenbasis::central(N));
  m_a2[0].resize(std::size_t(g.nx) * g.ny);
  for (int kx = 0; kx < g.nx; ++kx)
    for (int ky = 0; ky < g.ny; ++ky) {
      const double xi = std::numbers::pi * fft::signed_bin(kx, g.nx) / g.Lx;
      const double eta = std::numbers::pi * fft::signed_bin(ky, g.ny) / g.Ly;
      m_a2[0][std::size_t(kx) * g.ny + ky] = xi * xi + eta * eta;
    }

  const int half = nt / 2;
  for (int m = 1; m <= half; ++m)
    m_slot_frame[m] = &frame_for(scale(m));

  std::vector<std::shared_ptr<const TwistedEigenbasis>> pos(half + 1);
  parallel_for(half, [&](int idx) {
    const int m = idx + 1;
    const double lam = m_lambdas[m];
    const double s = m_slot_frame[m]->scale;
    const bool nyq = is_nyquist(m);
    std::string cache_path;
    if (!m_opts.cache_dir.empty() && !nyq) {
      cache_path = (std::filesystem::path(m_opts.cache_dir) / eigenbasis_cache_name(lam, N, s)).string();
      if (std::filesystem::exists(cache_path)) {
        pos[m] = std::make_shared<const TwistedEigenbasis>(load_eigenbasis(cache_path, s));
        return;
      }
    }
    auto b = std::make_shared<const TwistedEigenbasis>(build_eigenbasis(lam, N, s, nyq));
    if (!cache_path.empty())
      save_eigenbasis(cache_path, *b);
    pos[m] = b;
  });
  for (int m = 1; m <= half; ++m) {
    m_bases[m] = pos[m];
    m_a2[m] = pos[m]->eigenvalues();
  }
  for (int m = half + 1; m < nt; ++m) {
    const int mm = nt - m;
    TwistedEigenbasis mirror = *pos[mm];
    mirror.m_lambda = -mirror.m_lambda;
    mirror.m_mirror = true;
    m_bases[m] = std::make_shared<const TwistedEigenbasis>(std::move(mirror));
    m_slot_frame[m] = m_slot_frame[mm];
    m_a2[m] = m_a2[mm];
  }
}

GroupFourier::~GroupFourier() = default;

double GroupFourier::scale(int slot) const {
  if (slot == 0)
    return 0.0;
  if (!m_opts.adaptive_scale)
    return m_opts.fixed_scale;
  return std::clamp(natural_scale(m_lambdas[slot]), m_scale_lo, m_scale_hi);
}

const TwistedEigenbasis &GroupFourier::basis(int slot) const { return *m_bases[slot]; }

const GroupFourier::Frame &GroupFourier::frame_for(double s) {
  for (const auto &f : m_frames)
    if (f->scale == s)
      return *f;
  auto F = std::make_unique<Frame>();
  F->scale = s;
  double dx = 0, dy = 0;
  F->Vx = orthonormal_frame(m_N, s, m_grid.nx, m_grid.hx(), m_grid.Lx, dx).cast<cplx>();
  F->Vy = orthonormal_frame(m_N, s, m_grid.ny, m_grid.hy(), m_grid.Ly, dy).cast<cplx>();
  F->gram_defect = std::max(dx, dy);
  m_gram_defect = std::max(m_gram_defect, F->gram_defect);
  if (F->gram_defect > 0.1)
    throw PreconditionError("group transform: sampled Hermite frame is far from orthonormal");
  m_frames.push_back(std::move(F));
  return *m_frames.back();
}

using RowMatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void GroupFourier::project(const cplx *plane, const Frame &F, cplx *out) const {
  Eigen::Map<const RowMatC> U(plane, m_grid.nx, m_grid.ny);
  Eigen::Map<RowMatC> C(out, m_N, m_N);
  C.noalias() = F.Vx.transpose() * U * F.Vy;
}

void GroupFourier::synthesize(const cplx *coef, const Frame &F, cplx *plane) const {
  Eigen::Map<const RowMatC> C(coef, m_N, m_N);
  Eigen::Map<RowMatC> U(plane, m_grid.nx, m_grid.ny);
  U.noalias() = F.Vx * C * F.Vy.transpose();
}

void GroupFourier::slot_forward(int s, const cplx *plane, cplx *out) const {
  const Grid3 &g = m_grid;
  if (s == 0) {
    fft::c2c_2d(plane, out, g.nx, g.ny, -1);
    const double f = 1.0 / std::sqrt(double(g.nx) * g.ny);
    for (std::size_t n = 0; n < std::size_t(g.nx) * g.ny; ++n)
      out[n] *= f;
    return;
  }
  std::vector<cplx> frame(std::size_t(m_N) * m_N);
  project(plane, *m_slot_frame[s], frame.data());
  m_bases[s]->to_eigen(frame.data(), out);
}

void GroupFourier::slot_inverse(int s, const cplx *coef, cplx *plane) const {
  const Grid3 &g = m_grid;
  if (s == 0) {
    fft::c2c_2d(coef, plane, g.nx, g.ny, +1);
    const double f = 1.0 / std::sqrt(double(g.nx) * g.ny);
    for (std::size_t n = 0; n < std::size_t(g.nx) * g.ny; ++n)
      plane[n] *= f;
    return;
  }
  std::vector<cplx> frame(std::size_t(m_N) * m_N);
  m_bases[s]->to_frame(coef, frame.data());
  synthesize(frame.data(), *m_slot_frame[s], plane);
}

SpectralCoeffs GroupFourier::zeros() const {
  SpectralCoeffs c;
  c.grid = m_grid;
  c.n_herm = m_N;
  c.lambdas = m_lambdas;
  c.coeffs.resize(slot_count());
  for (int s = 0; s < slot_count(); ++s)
    c.coeffs[s].assign(m_a2[s].size(), cplx(0.0));
  return c;
}

namespace {
// Factor taking the raw FFT bin m to the weighted plane coefficient.
double plane_weight(const Grid3 &g) { return std::sqrt(2.0 * g.Ltau) / g.ntau * std::sqrt(g.hx() * g.hy()); }
} // namespace

SpectralCoeffs GroupFourier::forward(const ScalarField &u) const {
  const Grid3 &g = m_grid;
  if (!(u.grid() == g))
    throw PreconditionError("forward_transform: field grid differs from transform grid");
  const int nt = g.ntau, nc = nt / 2 + 1, lines = g.nx * g.ny;
  std::vector<cplx> spec(std::size_t(nc) * lines);
  fft::r2c_lines(u.data(), spec.data(), nt, lines);
  SpectralCoeffs c = zeros();
  const double w = plane_weight(g);
  parallel_for(nc, [&](int m) {
    std::vector<cplx> plane(lines);
    const double f = (m & 1 ? -w : w);
    for (int l = 0; l < lines; ++l)
      plane[l] = f * spec[std::size_t(l) * nc + m];
    slot_forward(m, plane.data(), c.coeffs[m].data());
  });
  for (int m = nc; m < nt; ++m) {
    const auto &src = c.coeffs[nt - m];
    auto &dst = c.coeffs[m];
    for (std::size_t n = 0; n < src.size(); ++n)
      dst[n] = std::conj(src[n]);
  }
  return c;
}

SpectralCoeffs GroupFourier::forward(const ComplexField &u) const {
  const Grid3 &g = m_grid;
  if (!(u.grid() == g))
    throw PreconditionError("forward_transform: field grid differs from transform grid");
  const int nt = g.ntau, lines = g.nx * g.ny;
  std::vector<cplx> spec(u.size());
  fft::c2c_lines(u.data(), spec.data(), nt, lines, -1);
  SpectralCoeffs c = zeros();
  const double w = plane_weight(g);
  parallel_for(nt, [&](int m) {
    std::vector<cplx> plane(lines);
    const double f = (m & 1 ? -w : w);
    for (int l = 0; l < lines; ++l)
      plane[l] = f * spec[std::size_t(l) * nt + m];
    slot_forward(m, plane.data(), c.coeffs[m].data());
  });
  return c;
}

ComplexField GroupFourier::inverse(const SpectralCoeffs &c) const {
  const Grid3 &g = m_grid;
  const int nt = g.ntau, lines = g.nx * g.ny;
  std::vector<cplx> spec(g.size());
  const double w = plane_weight(g) * nt; // undo forward weight; FFTW backward is unnormalised
  parallel_for(nt, [&](int m) {
    std::vector<cplx> plane(lines);
    slot_inverse(m, c.coeffs[m].data(), plane.data());
    const double f = (m & 1 ? -1.0 : 1.0) / w;
    for (int l = 0; l < lines; ++l)
      spec[std::size_t(l) * nt + m] = f * plane[l];
  });
  ComplexField u(g);
  fft::c2c_lines(spec.data(), u.data(), nt, lines, +1);
  return u;
}

ScalarField GroupFourier::inverse_real(const SpectralCoeffs &c) const {
  const Grid3 &g = m_grid;
  const int nt = g.ntau, nc = nt / 2 + 1, lines = g.nx * g.ny;
  std::vector<cplx> spec(std::size_t(nc) * lines);
  const double w = plane_weight(g) * nt;
  parallel_for(nc, [&](int m) {
    std::vector<cplx> plane(lines);
    slot_inverse(m, c.coeffs[m].data(), plane.data());
    const double f = (m & 1 ? -1.0 : 1.0) / w;
    for (int l = 0; l < lines; ++l)
      spec[std::size_t(l) * nc + m] = f * plane[l];
  });
  ScalarField u(g);
  fft::c2r_lines(spec.data(), u.data(), nt, lines);
  return u;
}

double plancherel_defect(const ScalarField &u, const GroupFourier &gf) {
  const double n2 = l2_norm(u);
  if (n2 == 0.0)
    return 0.0;
  const double c2 = gf.forward(u).squared_norm();
  return std::abs(n2 * n2 - c2) / (n2 * n2);
}

double spectral_sobolev_norm(const ScalarField &u, double k, const GroupFourier &gf) {
  const SpectralCoeffs c = gf.forward(u);
  double s = 0.0;
  for (int slot = 0; slot < gf.slot_count(); ++slot) {
    const auto &a2 = gf.a2(slot);
    for (std::size_t n = 0; n < a2.size(); ++n)
      s += (k == 0.0 ? 1.0 : std::pow(a2[n], k)) * std::norm(c.coeffs[slot][n]);
  }
  return l2_norm(u) + std::sqrt(s);
}

} // namespace hrqhd::spectral
