#pragma once
// Closed-form and ODE references used by the tests. Nothing here calls into
// the library's numerics.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

// G = exp(-(x^2 + y^2)/w^2 - tau^2/wt^2) and its left-invariant derivatives,
// with X = dx - (y/2) dtau, Y = dy + (x/2) dtau.
struct Gaussian {
  double w = 1.0, wt = 1.0;

  double value(double x, double y, double t) const { return std::exp(-(x * x + y * y) / (w * w) - t * t / (wt * wt)); }
  double dx(double x, double y, double t) const { return -2 * x / (w * w) * value(x, y, t); }
  double dy(double x, double y, double t) const { return -2 * y / (w * w) * value(x, y, t); }
  double dt(double x, double y, double t) const { return -2 * t / (wt * wt) * value(x, y, t); }
  double X(double x, double y, double t) const { return dx(x, y, t) - 0.5 * y * dt(x, y, t); }
  double Y(double x, double y, double t) const { return dy(x, y, t) + 0.5 * x * dt(x, y, t); }
  // X^2 + Y^2 = dxx + dyy + (x^2 + y^2)/4 dtt + (x dy - y dx) dt; the last
  // term vanishes for radial profiles.
  double lap(double x, double y, double t) const {
    const double r2 = x * x + y * y, w2 = w * w, t2 = wt * wt;
    const double flat = 4 * r2 / (w2 * w2) - 4 / w2;
    const double vert = 0.25 * r2 * (4 * t * t / (t2 * t2) - 2 / t2);
    return value(x, y, t) * (flat + vert);
  }
};

// u = exp(-r^2/w^2) cos(k tau): periodic in tau when k = pi m / Ltau, and
// L u = (4 r^2/w^4 - 4/w^2 - k^2 r^2/4) u.
struct RadialMode {
  double w = 1.0, k = 1.0;
  double value(double x, double y, double t) const { return std::exp(-(x * x + y * y) / (w * w)) * std::cos(k * t); }
  double lap(double x, double y, double t) const {
    const double r2 = x * x + y * y, w2 = w * w;
    return (4 * r2 / (w2 * w2) - 4 / w2 - 0.25 * k * k * r2) * value(x, y, t);
  }
};

// L2-normalised Hermite functions of degree 0..3.
inline double hermite_function(int p, double x) {
  const double g = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  switch (p) {
  case 0: return g;
  case 1: return std::sqrt(2.0) * x * g;
  case 2: return (2 * x * x - 1) / std::sqrt(2.0) * g;
  case 3: return (2 * x * x * x - 3 * x) / std::sqrt(3.0) * g;
  default: return std::nan("");
  }
}

// Heisenberg group law in the same coordinates as the library.
inline std::array<double, 3> group_mul(const std::array<double, 3> &p, const std::array<double, 3> &q) {
  return {p[0] + q[0], p[1] + q[1], p[2] + q[2] + 0.5 * (p[0] * q[1] - p[1] * q[0])};
}

// Solves u'' + a^2 u = f(t), u(0) = u0, u'(0) = u1 to tight tolerance and
// returns (u(T), u'(T)).
inline std::array<double, 2> forced_oscillator(double a, double u0, double u1, const std::function<double(double)> &f,
                                               double T) {
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  State s{u0, u1};
  auto rhs = [&](const State &y, State &dy, double t) {
    dy[0] = y[1];
    dy[1] = f(t) - a * a * y[0];
  };
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-14, 1e-14), rhs, s, 0.0, T, 1e-3);
  return s;
}

inline double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace oracle
