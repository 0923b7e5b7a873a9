// One pass/fail line per primary acceptance criterion; exits 1 if any fails.
//   hrqhd_acceptance <configs dir> <scratch dir>
#include "hrqhd/config.hpp"
#include "hrqhd/error.hpp"
#include "hrqhd/run.hpp"
#include "hrqhd/solver.hpp"
#include "hrqhd/verify.hpp"
#include "hrqhd/wave.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace hrqhd;

namespace {

int failed = 0;

void line(int id, bool ok, const std::string &what, const std::string &detail) {
  std::printf("criterion %d: %s  %s [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  failed += !ok;
}

std::string fmt(const char *f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Runs the suites of one criterion; passes when all pass inside the time limit.
void suites(int id, const std::string &what, const std::vector<std::string> &names, double limit) {
  bool ok = true;
  double secs = 0;
  std::string failing;
  for (const auto &n : names) {
    const auto r = verify::run_suite(n);
    secs += r.seconds;
    if (!r.pass()) {
      ok = false;
      std::fputs(r.table().c_str(), stdout);
      failing += " " + n;
    }
  }
  std::string detail = fmt("%.1f s, limit %.0f s", secs, limit);
  if (!failing.empty())
    detail += ", failing:" + failing;
  line(id, ok && secs < limit, what, detail);
}

void reference_run(const std::string &cfg_dir, const std::string &scratch) {
  const auto t0 = std::chrono::steady_clock::now();
  const io::RunConfig cfg = io::load_config(cfg_dir + "/reference.cfg");
  const auto out = io::simulate(cfg, scratch + "/reference");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto &r = out.result;

  bool ratios = r.log.rows.size() >= 2;
  double worst = 0;
  for (std::size_t k = 1; k < r.log.rows.size(); ++k) {
    worst = std::max(worst, r.log.rows[k].ratio);
    ratios = ratios && r.log.rows[k].ratio < 1.0;
  }
  const double low = r.log.rows.empty() ? NAN : r.log.rows.back().norm.total;
  const double floor = 0.25 * std::sqrt(cfg.physics.delta);
  const bool conv = out.exit_code == io::ExitOk;
  const bool lowok = low <= 1e-8;
  const bool pos = r.min_rho_tilde >= floor;
  const bool eq = r.equivalence.max_rho <= 1e-6 && r.equivalence.max_S <= 1e-6;
  const bool red = r.reduced.pass;
  const bool fast = secs < 900;
  std::printf("  reference: exit %d, %d iterations, M* = %.6g, T = %.6g, dt = %.6g\n", out.exit_code, r.iterations,
              r.M_star, r.T, r.dt);
  std::printf("  ratios from iteration 2 on < 1: %s (max %.4f)\n", ratios ? "yes" : "no", worst);
  std::printf("  final ||Y||_low = %.3e (<= 1e-8)\n", low);
  std::printf("  min rho~ = %.6f (>= %.6f)\n", r.min_rho_tilde, floor);
  std::printf("  equivalence: |rho~ - rho| = %.3e, |S~ - S| = %.3e (<= 1e-6)\n", r.equivalence.max_rho,
              r.equivalence.max_S);
  std::printf("  reduced residuals: rho %.3e / %.3e, S %.3e / %.3e, V %.3e / %.3e (value / budget)\n",
              r.reduced.wave_rho, r.reduced.budget_rho, r.reduced.wave_S, r.reduced.budget_S, r.reduced.poisson,
              r.reduced.budget_poisson);
  line(7, conv && ratios && lowok && pos && eq && red && fast, "end-to-end Picard run on the reference config",
       fmt("%.1f s, limit 900 s; max ratio %.4f; final low %.2e; min rho~ %.5f", secs, worst, low, r.min_rho_tilde));
}

void negative_tests(const std::string &cfg_dir, const std::string &scratch) {
  // vacuum-violating data
  const io::RunConfig vc = io::load_config(cfg_dir + "/vacuum.cfg");
  const auto vout = io::simulate(vc, scratch + "/vacuum");
  const bool vac = vout.exit_code == io::ExitVacuum;

  // harmonic defect: S~ - S = c (1 + x/5) has zero sub-Laplacian
  const Grid3 g(24, 24, 16, 6.0, 6.0, 6.0);
  const geom::HeisenbergCalculus calc(g, 4);
  solver::Trajectory traj(3);
  for (int m = 0; m < 3; ++m) {
    auto &U = traj[m];
    U.t = 0.1 * m;
    U.rho = U.rho_tilde = ScalarField(g, 1.0);
    U.S = U.S_tilde = ScalarField(g, 0.0);
  }
  const auto h = ScalarField::from_function(g, [](double x, double, double) { return 1e-4 * (1 + 0.2 * x); });
  traj[2].S_tilde = traj[2].S + h;
  const auto eq = solver::equivalence_check(traj, 1e-6, calc);
  const bool harmonic = !eq.pass && eq.max_S > 1e-6 && eq.max_lap < 1e-10;

  // unstable leapfrog step
  const double bound = linear::leapfrog_dt_bound(calc);
  bool refused = false;
  double reported = 0;
  try {
    const ScalarField z(g);
    (void)linear::leapfrog_propagate(z, z, [&](double) { return ScalarField(g); }, 10 * bound, 1.1 * bound, calc);
  } catch (const UnstableStepError &e) {
    refused = true;
    reported = e.bound();
  }
  const bool bound_ok = refused && std::abs(reported - bound) <= 1e-12 * bound;
  std::printf("  vacuum config: exit %d (want 3)\n", vout.exit_code);
  std::printf("  harmonic defect: |S~ - S| = %.3e, |L(S~ - S)| = %.3e, check %s\n", eq.max_S, eq.max_lap,
              eq.pass ? "passed (missed)" : "failed (detected)");
  std::printf("  leapfrog dt = 1.1 x bound: %s, reported bound %.6g vs computed %.6g\n",
              refused ? "refused" : "accepted", reported, bound);
  line(8, vac && harmonic && bound_ok, "negative tests: vacuum, harmonic defect, unstable step",
       std::string(vac ? "vacuum ok" : "vacuum MISSED") + ", " + (harmonic ? "defect ok" : "defect MISSED") + ", " +
           (bound_ok ? "bound ok" : "bound MISSED"));
}

} // namespace

int main(int argc, char **argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <configs dir> <scratch dir>\n", argv[0]);
    return 2;
  }
  const std::string cfg_dir = argv[1], scratch = argv[2];
  std::filesystem::create_directories(scratch);
  try {
    suites(1, "geometry: group law, dilations, commutator order", {"geometry"}, 60);
    suites(2, "twisted Laplacian spectrum", {"spectrum"}, 120);
    suites(3, "Plancherel and round trip", {"plancherel"}, 120);
    suites(4, "Duhamel propagator", {"duhamel"}, 180);
    suites(5, "wave energy estimate ratios", {"lemma33"}, 180);
    suites(6, "Madelung identity and KGP round trip", {"identity210", "madelung"}, 120);
    reference_run(cfg_dir, scratch);
    negative_tests(cfg_dir, scratch);
  } catch (const std::exception &e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 8 criteria failed\n", failed);
  return failed ? 1 : 0;
}
