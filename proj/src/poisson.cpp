#include "hrqhd/poisson.hpp"

#include "hrqhd/error.hpp"

#include <cmath>
#include <sstream>

namespace hrqhd::linear {

using spectral::GroupFourier;
using spectral::SpectralCoeffs;

SpectralCoeffs solve_poisson_coeffs(const SpectralCoeffs &g, int sign, const GroupFourier &gf) {
  if (sign != 1 && sign != -1)
    throw PreconditionError("solve_poisson: sign must be +1 or -1");
  // sign * (-a^2) u = g
  SpectralCoeffs u = gf.multiply(g, [sign](double a2) { return a2 > 0 ? -1.0 / (sign * a2) : 0.0; });
  return u;
}

PoissonResult solve_poisson(const ScalarField &g, int sign, const GroupFourier &gf, const PoissonOptions &opts) {
  PoissonResult r;
  SpectralCoeffs c = gf.forward(g);
  const double gn = l2_norm(g);
  const double mean_coeff = std::abs(c.coeffs[0][0]);
  if (gn > 0 && mean_coeff > opts.compat_tol * gn) {
    const double m = mean(g);
    if (!opts.project_mean) {
      std::ostringstream os;
      os << "solve_poisson: source mean " << m << " is incompatible with a decaying solution";
      throw IncompatibleSourceError(os.str(), m);
    }
    r.dropped_mean = m;
  }
  r.u = gf.inverse_real(solve_poisson_coeffs(c, sign, gf));
  if (opts.gauge == Gauge::FarField)
    r.u += -shell_mean(r.u, opts.shell);
  return r;
}

CgResult solve_poisson_cg(const ScalarField &g, int sign, const geom::HeisenbergCalculus &calc, double tol,
                          int max_iterations) {
  auto A = [&](const ScalarField &u) { return calc.X_transpose(calc.X(u)) + calc.Y_transpose(calc.Y(u)); };
  ScalarField b = g;
  b *= double(-sign);
  b += -mean(b);
  CgResult r;
  r.u = ScalarField(g.grid());
  ScalarField res = b;
  ScalarField p = res;
  double rr = inner(res, res);
  const double bb = rr;
  if (bb == 0.0) {
    r.converged = true;
    return r;
  }
  for (int it = 0; it < max_iterations; ++it) {
    ScalarField Ap = A(p);
    const double alpha = rr / inner(p, Ap);
    for (std::size_t k = 0; k < p.size(); ++k) {
      r.u[k] += alpha * p[k];
      res[k] -= alpha * Ap[k];
    }
    // keep the residual in the range of the operator
    res += -mean(res);
    const double rr_new = inner(res, res);
    r.iterations = it + 1;
    r.relative_residual = std::sqrt(rr_new / bb);
    if (r.relative_residual <= tol) {
      r.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] = res[k] + beta * p[k];
  }
  r.u += -mean(r.u);
  return r;
}

} // namespace hrqhd::linear
