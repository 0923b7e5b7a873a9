// Command-line front end. Talks to the library only through hrqhd.h.
#include "hrqhd/hrqhd.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

int report_error(const char *what) {
  std::fprintf(stderr, "hrqhd: %s: %s\n", what, hrqhd_last_error());
  return 1;
}

std::string suite_list() {
  std::string s;
  for (size_t i = 0; i < hrqhd_suite_count(); ++i)
    s += (i ? ", " : "") + std::string(hrqhd_suite_name(i));
  return s;
}

int cmd_simulate(const std::string &config, const std::string &out, const std::vector<std::string> &sets,
                 bool quiet) {
  hrqhd_config *c = nullptr;
  if (hrqhd_config_load(config.c_str(), &c) != HRQHD_OK)
    return report_error("config");
  for (const auto &kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "hrqhd: --set expects key=value, got '%s'\n", kv.c_str());
      hrqhd_config_free(c);
      return 1;
    }
    if (hrqhd_config_set(c, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != HRQHD_OK) {
      hrqhd_config_free(c);
      return report_error("config");
    }
  }
  hrqhd_run *r = nullptr;
  const hrqhd_status st = hrqhd_simulate(c, out.empty() ? nullptr : out.c_str(), quiet ? 0 : 1, &r);
  hrqhd_config_free(c);
  if (st != HRQHD_OK)
    return report_error("simulate");
  hrqhd_run_summary s;
  hrqhd_run_get_summary(r, &s);
  hrqhd_run_free(r);
  const char *status = s.exit_code == 0 ? "converged" : s.exit_code == 2 ? "non-contraction" : "vacuum";
  std::printf("status %s after %d iterations (final low norm %.3e, T = %.6g, %.1f s)\n", status, s.iterations,
              s.final_low_norm, s.T, s.seconds);
  if (s.exit_code == 3)
    std::printf("vacuum: value %.6g at t = %.6g, (x, y, tau) = (%.6g, %.6g, %.6g)\n", s.vacuum_value,
                s.vacuum_t, s.vacuum_x, s.vacuum_y, s.vacuum_tau);
  return s.exit_code;
}

int cmd_verify(const std::string &suite) {
  hrqhd_suite_report *r = nullptr;
  const hrqhd_status st = hrqhd_verify(suite.c_str(), &r);
  if (st == HRQHD_ERR_CONFIG) {
    std::fprintf(stderr, "hrqhd: %s\n", hrqhd_last_error());
    return 1;
  }
  if (st != HRQHD_OK)
    return report_error("verify");
  std::fputs(hrqhd_suite_table(r), stdout);
  const bool ok = hrqhd_suite_passed(r);
  hrqhd_suite_free(r);
  return ok ? 0 : 1;
}

int cmd_spectrum(double lambda, int n_max, int n_herm) {
  std::vector<double> lev(n_max + 1), ref(n_max + 1);
  if (hrqhd_spectrum(lambda, n_max, n_herm, lev.data(), ref.data()) != HRQHD_OK)
    return report_error("spectrum");
  std::printf("%4s %22s %22s %12s\n", "n", "eigenvalue", "(2n+1)|lambda|", "rel_error");
  for (int n = 0; n <= n_max; ++n)
    std::printf("%4d %22.15g %22.15g %12.3e\n", n, lev[n], ref[n], std::abs(lev[n] - ref[n]) / ref[n]);
  return 0;
}

int cmd_snapshot_dump(const std::string &path) {
  hrqhd_snapshot *s = nullptr;
  if (hrqhd_snapshot_open(path.c_str(), &s) != HRQHD_OK)
    return report_error("snapshot-dump");
  hrqhd_snapshot_info info;
  hrqhd_snapshot_get_info(s, &info);
  std::printf("version %u\ngrid %d x %d x %d\nbox %.17g x %.17g x %.17g\ntime %.17g\nfields %zu\n", info.version,
              info.nx, info.ny, info.ntau, info.Lx, info.Ly, info.Ltau, info.time, info.field_count);
  for (size_t i = 0; i < info.field_count; ++i) {
    const char *name = nullptr;
    int cplx = 0;
    const double *d = nullptr;
    size_t n = 0;
    hrqhd_snapshot_field(s, i, &name, &cplx, &d, &n);
    double lo = INFINITY, hi = -INFINITY;
    for (size_t k = 0; k < n; ++k) {
      lo = std::fmin(lo, d[k]);
      hi = std::fmax(hi, d[k]);
    }
    std::printf("  %-10s %-7s min %.6g max %.6g\n", name, cplx ? "complex" : "real", lo, hi);
  }
  hrqhd_snapshot_free(s);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Picard solver for the rescaled quantum hydrodynamics system on the Heisenberg group"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hrqhd_version()));
  app.footer(std::string("Exit codes: 0 success, 1 config or usage error, 2 non-contraction, 3 vacuum.\n"
                         "HRQHD_THREADS sets the worker count (default 1).\n\n") +
             hrqhd_csv_columns());
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides HRQHD_THREADS)")->check(CLI::NonNegativeNumber);

  std::string config, out;
  std::vector<std::string> sets;
  bool quiet = false;
  auto *sim = app.add_subcommand("simulate", "Run the Picard iteration and write the run directory");
  sim->add_option("config", config, "Config file")->required();
  sim->add_option("--out", out, "Output directory (default: output.dir)");
  sim->add_option("--set", sets, "Override a key, e.g. --set iteration.dt=0.01");
  sim->add_flag("-q,--quiet", quiet, "No progress log");

  std::string suite;
  auto *ver = app.add_subcommand("verify", "Run an invariant suite and print its pass/fail table");
  ver->add_option("suite", suite, "One of: " + suite_list())->required();

  double lambda = 1.0;
  int n_max = 5, n_herm = 32;
  auto *spec = app.add_subcommand("spectrum", "Print twisted Laplacian levels against (2n+1)|lambda|");
  spec->add_option("--lambda", lambda, "Frequency (nonzero)");
  spec->add_option("--n-max", n_max, "Highest level")->check(CLI::NonNegativeNumber);
  spec->add_option("--n-herm", n_herm, "Hermite functions per axis")->check(CLI::PositiveNumber);

  std::string snap;
  auto *dump = app.add_subcommand("snapshot-dump", "Decode a snapshot header and field ranges");
  dump->add_option("path", snap, "Snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (threads > 0)
    hrqhd_set_threads(threads);

  if (*sim)
    return cmd_simulate(config, out, sets, quiet);
  if (*ver)
    return cmd_verify(suite);
  if (*spec)
    return cmd_spectrum(lambda, n_max, n_herm);
  return cmd_snapshot_dump(snap);
}
