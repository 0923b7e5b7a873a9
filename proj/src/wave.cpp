#include "hrqhd/wave.hpp"

#include "hrqhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace hrqhd::linear {

using spectral::GroupFourier;
using spectral::SpectralCoeffs;

void SourceTrace::validate(double t0, double t1) const {
  if (times.size() != snapshots.size())
    throw PreconditionError("source trace: times and snapshots differ in length");
  if (times.size() < 2)
    throw PreconditionError("source trace: need at least two samples");
  for (std::size_t m = 1; m < times.size(); ++m)
    if (!(times[m] > times[m - 1]))
      throw PreconditionError("source trace: times must be strictly increasing");
  const double tol = 1e-12 * std::max(1.0, std::abs(t1));
  if (times.front() > t0 + tol || times.back() < t1 - tol) {
    std::ostringstream os;
    os << "source trace covers [" << times.front() << ", " << times.back() << "], propagation needs [" << t0 << ", "
       << t1 << "]";
    throw PreconditionError(os.str());
  }
}

namespace {
double sinc(double x) {
  if (std::abs(x) < 1e-4)
    return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}
// (sin x - x cos x) / x^3
double g3(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0;
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}
// int_0^h sigma sin(a sigma)/a d sigma
double a1(double a, double h) { return h * h * h * g3(a * h); }
} // namespace

double sin_over_a(double a, double t) { return t * sinc(a * t); }

double one_minus_cos_over_a2(double a, double t) {
  const double s = sinc(0.5 * a * t);
  return 0.5 * t * t * s * s;
}

void duhamel_weights(double a, const std::vector<double> &times, double T, Quadrature q, std::vector<double> &wu,
                     std::vector<double> &wut) {
  const std::size_t n = times.size();
  wu.assign(n, 0.0);
  wut.assign(n, 0.0);
  const double t0 = times.front();
  if (T <= t0)
    return;
  const double tol = 1e-12 * std::max(1.0, std::abs(T));
  // last node index strictly inside [t0, T), and interpolation of f(T)
  std::size_t last = 0;
  while (last + 1 < n && times[last + 1] <= T + tol)
    ++last;
  const bool on_node = std::abs(times[last] - T) <= tol;

  // effective nodes and the map from effective values to samples
  std::vector<double> s;
  std::vector<std::vector<std::pair<std::size_t, double>>> refs;
  for (std::size_t m = 0; m <= last; ++m) {
    s.push_back(times[m]);
    refs.push_back({{m, 1.0}});
  }
  if (!on_node) {
    if (last + 1 >= n)
      throw PreconditionError("source trace ends before the propagation time");
    const double alpha = (T - times[last]) / (times[last + 1] - times[last]);
    s.push_back(T);
    refs.push_back({{last, 1.0 - alpha}, {last + 1, alpha}});
  } else {
    s.back() = T;
  }
  const std::size_t ne = s.size();
  std::vector<double> eu(ne, 0.0), eut(ne, 0.0);

  if (q == Quadrature::Linear) {
    for (std::size_t m = 0; m + 1 < ne; ++m) {
      const double h = s[m + 1] - s[m];
      const double tau0 = T - s[m + 1];
      const double S0 = sin_over_a(a, tau0), C0 = std::cos(a * tau0);
      const double Sh = sin_over_a(a, h), Ah = one_minus_cos_over_a2(a, h), A1h = a1(a, h);
      const double I0 = S0 * Sh + C0 * Ah;
      const double P1 = S0 * (h * Sh - Ah) + C0 * A1h;
      const double J0 = C0 * Sh - a * a * S0 * Ah;
      const double Q1 = C0 * (h * Sh - Ah) - a * a * S0 * A1h;
      eu[m] += P1 / h;
      eu[m + 1] += I0 - P1 / h;
      eut[m] += Q1 / h;
      eut[m + 1] += J0 - Q1 / h;
    }
  } else {
    std::vector<double> qw(ne, 0.0);
    if (q == Quadrature::Trapezoid) {
      for (std::size_t m = 0; m + 1 < ne; ++m) {
        const double h = s[m + 1] - s[m];
        qw[m] += 0.5 * h;
        qw[m + 1] += 0.5 * h;
      }
    } else {
      const std::size_t intervals = ne - 1;
      const double h = (s.back() - s.front()) / double(intervals);
      bool uniform = intervals % 2 == 0;
      for (std::size_t m = 0; m + 1 < ne && uniform; ++m)
        uniform = std::abs(s[m + 1] - s[m] - h) <= 1e-9 * h;
      if (!uniform)
        throw PreconditionError("Simpson quadrature needs an even number of uniform intervals");
      for (std::size_t m = 0; m < ne; ++m)
        qw[m] = h / 3.0 * ((m == 0 || m == ne - 1) ? 1.0 : (m % 2 ? 4.0 : 2.0));
    }
    for (std::size_t m = 0; m < ne; ++m) {
      const double tau = T - s[m];
      eu[m] = qw[m] * sin_over_a(a, tau);
      eut[m] = qw[m] * std::cos(a * tau);
    }
  }
  for (std::size_t m = 0; m < ne; ++m)
    for (const auto &[idx, w] : refs[m]) {
      wu[idx] += w * eu[m];
      wut[idx] += w * eut[m];
    }
}

void propagate_coeffs(const GroupFourier &gf, const SpectralCoeffs &c0, const SpectralCoeffs &c1,
                      const std::vector<SpectralCoeffs> &f, const std::vector<double> &times, double T, Quadrature q,
                      SpectralCoeffs &cT, SpectralCoeffs &ctT) {
  const double t0 = times.front();
  const double dt = T - t0;
  cT = gf.zeros();
  ctT = gf.zeros();
  std::vector<double> wu, wut;
  const std::size_t nf = f.size();
  for (int s = 0; s < gf.slot_count(); ++s) {
    const auto &a2 = gf.a2(s);
    for (std::size_t n = 0; n < a2.size(); ++n) {
      const double a = std::sqrt(std::max(0.0, a2[n]));
      const double c = std::cos(a * dt), sa = sin_over_a(a, dt);
      const cplx u0 = c0.coeffs[s][n], u1 = c1.coeffs[s][n];
      cplx u = c * u0 + sa * u1;
      cplx ut = -a * a * sa * u0 + c * u1;
      if (nf > 0) {
        duhamel_weights(a, times, T, q, wu, wut);
        for (std::size_t m = 0; m < nf; ++m) {
          if (wu[m] == 0.0 && wut[m] == 0.0)
            continue;
          const cplx fm = f[m].coeffs[s][n];
          u += wu[m] * fm;
          ut += wut[m] * fm;
        }
      }
      cT.coeffs[s][n] = u;
      ctT.coeffs[s][n] = ut;
    }
  }
}

WaveState duhamel_propagate(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T,
                            const GroupFourier &gf, Quadrature q) {
  if (!(T > 0))
    throw PreconditionError("duhamel_propagate: T must be positive");
  f.validate(0.0, T);
  if (std::abs(f.times.front()) > 1e-12 * std::max(1.0, T))
    throw PreconditionError("duhamel_propagate: source trace must start at t = 0");
  std::vector<SpectralCoeffs> fc;
  fc.reserve(f.snapshots.size());
  for (const auto &fs : f.snapshots)
    fc.push_back(gf.forward(fs));
  SpectralCoeffs cT, ctT;
  propagate_coeffs(gf, gf.forward(u0), gf.forward(u1), fc, f.times, T, q, cT, ctT);
  return {gf.inverse_real(cT), gf.inverse_real(ctT), T};
}

WaveState duhamel_propagate(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T, int N,
                            Quadrature q) {
  GroupFourier gf(u0.grid(), N);
  return duhamel_propagate(u0, u1, f, T, gf, q);
}

double spectral_radius_estimate(const geom::HeisenbergCalculus &calc, int iterations) {
  const Grid3 &g = calc.grid();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField v(g);
  for (auto &x : v.values())
    x = dist(rng);
  double rho = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = l2_norm(v);
    v *= 1.0 / nv;
    ScalarField w = calc.sub_laplacian(v);
    rho = l2_norm(w);
    v = std::move(w);
  }
  return rho;
}

double leapfrog_dt_bound(const geom::HeisenbergCalculus &calc, const LeapfrogOptions &opts) {
  static std::mutex mutex;
  static std::map<std::tuple<const geom::HeisenbergCalculus *, int, int, int, int>, double> cache;
  const Grid3 &g = calc.grid();
  const auto key = std::make_tuple(&calc, g.nx, g.ny, g.ntau, opts.power_iterations);
  double rho;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end())
      rho = it->second;
    else
      rho = cache[key] = spectral_radius_estimate(calc, opts.power_iterations);
  }
  return opts.c_cfl / std::sqrt(rho);
}

LeapfrogResult leapfrog_propagate(const ScalarField &u0, const ScalarField &u1,
                                  const std::function<ScalarField(double)> &f, double T, double dt,
                                  const geom::HeisenbergCalculus &calc, const LeapfrogOptions &opts) {
  LeapfrogResult r;
  r.dt_bound = leapfrog_dt_bound(calc, opts);
  if (!(dt > 0) || dt > r.dt_bound) {
    std::ostringstream os;
    os << "leapfrog: dt = " << dt << " exceeds the stability bound " << r.dt_bound;
    throw UnstableStepError(os.str(), r.dt_bound);
  }
  const int n = std::max(1, int(std::lround(T / dt)));
  r.steps = n;
  const double dt2 = dt * dt;
  auto grad_sq = [&](const ScalarField &u) {
    const double a = l2_norm(calc.X(u)), b = l2_norm(calc.Y(u));
    return a * a + b * b;
  };
  ScalarField Lu = calc.sub_laplacian(u0);
  r.energy_first = l2_norm(u1) * l2_norm(u1) + grad_sq(u0);

  ScalarField prev = u0;
  ScalarField cur = u0;
  {
    ScalarField acc = Lu + f(0.0);
    for (std::size_t k = 0; k < cur.size(); ++k)
      cur[k] += dt * u1[k] + 0.5 * dt2 * acc[k];
  }
  auto staggered = [&](const ScalarField &next, const ScalarField &now, const ScalarField &Lnow) {
    double kin = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      const double d = (next[k] - now[k]) / dt;
      kin += d * d;
    }
    return kin * next.grid().cell_volume() - inner(next, Lnow);
  };
  r.staggered_energy_first = staggered(cur, prev, Lu);
  r.staggered_energy_last = r.staggered_energy_first;
  // advance to step n, then one extra step for the centred u_t
  ScalarField Lcur = calc.sub_laplacian(cur);
  for (int step = 1; step <= n; ++step) {
    ScalarField fs = f(step * dt);
    ScalarField next(cur.grid());
    for (std::size_t k = 0; k < cur.size(); ++k)
      next[k] = 2.0 * cur[k] - prev[k] + dt2 * (Lcur[k] + fs[k]);
    if (step < n)
      r.staggered_energy_last = staggered(next, cur, Lcur);
    if (step == n) {
      ScalarField ut(cur.grid());
      for (std::size_t k = 0; k < cur.size(); ++k)
        ut[k] = (next[k] - prev[k]) / (2.0 * dt);
      r.energy_last = l2_norm(ut) * l2_norm(ut) + grad_sq(cur);
      r.state = {cur, std::move(ut), n * dt};
      break;
    }
    prev = std::move(cur);
    cur = std::move(next);
    Lcur = calc.sub_laplacian(cur);
  }
  return r;
}

namespace {
// ||u||_{W^k} in the spectral form, restricted to the span
double wnorm(const GroupFourier &gf, const SpectralCoeffs &c, double k) {
  double l2 = 0.0, top = 0.0;
  for (int s = 0; s < gf.slot_count(); ++s) {
    const auto &a2 = gf.a2(s);
    for (std::size_t n = 0; n < a2.size(); ++n) {
      const double m = std::norm(c.coeffs[s][n]);
      l2 += m;
      top += (k == 0 ? 1.0 : std::pow(a2[n], k)) * m;
    }
  }
  return std::sqrt(l2) + std::sqrt(top);
}
double sq(double x) { return x * x; }
SpectralCoeffs lap_plus(const GroupFourier &gf, const SpectralCoeffs &c, const SpectralCoeffs &f) {
  SpectralCoeffs r = gf.multiply(c, [](double a2) { return -a2; });
  r += f;
  return r;
}
} // namespace

EnergyLemmaReport energy_lemma_check(const ScalarField &u0, const ScalarField &u1, const SourceTrace &f, double T,
                                     const GroupFourier &gf, double slack) {
  f.validate(0.0, T);
  std::vector<SpectralCoeffs> fc;
  for (const auto &fs : f.snapshots)
    fc.push_back(gf.forward(fs));
  const SpectralCoeffs c0 = gf.forward(u0), c1 = gf.forward(u1);
  const std::size_t M = f.times.size();

  // f_t on each sample from the piecewise-linear reconstruction
  std::vector<SpectralCoeffs> ft(M);
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t a = m + 1 < M ? m : m - 1;
    const double h = f.times[a + 1] - f.times[a];
    SpectralCoeffs d = fc[a + 1];
    SpectralCoeffs neg = fc[a];
    neg *= -1.0;
    d += neg;
    d *= 1.0 / h;
    ft[m] = std::move(d);
  }

  double int_f2 = 0.0, sup_f3 = 0.0, sup_ft3 = 0.0, sup_ft0 = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    if (f.times[m] > T + 1e-12)
      break;
    if (m + 1 < M && f.times[m + 1] <= T + 1e-12)
      int_f2 += 0.5 * (f.times[m + 1] - f.times[m]) * (fc[m].squared_norm() + fc[m + 1].squared_norm());
    sup_f3 = std::max(sup_f3, sq(wnorm(gf, fc[m], 3)));
    sup_ft3 = std::max(sup_ft3, sq(wnorm(gf, ft[m], 3)));
    sup_ft0 = std::max(sup_ft0, ft[m].squared_norm());
  }

  EnergyLemmaReport r;
  double sup_first = 0, sup_high = 0, sup_ttt = 0, sup_ut2 = 0;
  for (std::size_t m = 0; m < M && f.times[m] <= T + 1e-12; ++m) {
    SpectralCoeffs c, ct;
    if (m == 0) {
      c = c0;
      ct = c1;
    } else {
      std::vector<double> tm(f.times.begin(), f.times.begin() + m + 1);
      std::vector<SpectralCoeffs> fm(fc.begin(), fc.begin() + m + 1);
      propagate_coeffs(gf, c0, c1, fm, tm, f.times[m], Quadrature::Trapezoid, c, ct);
    }
    const SpectralCoeffs ctt = lap_plus(gf, c, fc[m]);
    const SpectralCoeffs cttt = lap_plus(gf, ct, ft[m]);
    sup_first = std::max(sup_first, sq(wnorm(gf, c, 1)) + ct.squared_norm());
    sup_high = std::max(sup_high, sq(wnorm(gf, c, 5)) + sq(wnorm(gf, ct, 4)) + sq(wnorm(gf, ctt, 3)));
    sup_ttt = std::max(sup_ttt, cttt.squared_norm());
    sup_ut2 = std::max(sup_ut2, sq(wnorm(gf, ct, 2)));
  }
  auto ratio = [](double rhs, double lhs) { return lhs > 0 ? rhs / lhs : std::numeric_limits<double>::infinity(); };
  r.lhs_first = sup_first;
  r.rhs_first = sq(wnorm(gf, c0, 1)) + c1.squared_norm() + T * int_f2;
  r.ratio_first = ratio(r.rhs_first, r.lhs_first);
  r.lhs_high = sup_high;
  r.rhs_high = sq(wnorm(gf, c0, 5)) + sq(wnorm(gf, c1, 4)) + T * T * sup_f3 + T * T * sup_ft3;
  r.ratio_high = ratio(r.rhs_high, r.lhs_high);
  r.lhs_ttt = sup_ttt;
  r.rhs_ttt = sup_ut2 + T * T * sup_ft0;
  r.ratio_ttt = ratio(r.rhs_ttt, r.lhs_ttt);
  r.min_ratio = std::min({r.ratio_first, r.ratio_high, r.ratio_ttt});
  r.pass = r.min_ratio >= 1.0 / slack;
  return r;
}

} // namespace hrqhd::linear
