#include "hrqhd/hrqhd.h"

#include "hrqhd/config.hpp"
#include "hrqhd/error.hpp"
#include "hrqhd/group_fourier.hpp"
#include "hrqhd/parallel.hpp"
#include "hrqhd/run.hpp"
#include "hrqhd/snapshot.hpp"
#include "hrqhd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>

using namespace hrqhd;

struct hrqhd_config {
  std::map<std::string, std::string> kv;
  io::RunConfig cfg;
  std::string rendered;
};

struct hrqhd_run {
  io::SimulationOutput out;
};

struct hrqhd_suite_report {
  verify::SuiteReport report;
  std::string table;
};

struct hrqhd_snapshot {
  io::Snapshot snap;
};

namespace {

thread_local std::string g_last_error;

hrqhd_status fail(hrqhd_status s, const std::string &msg) {
  g_last_error = msg;
  return s;
}

template <class F> hrqhd_status guarded(F &&f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const ConfigError &e) {
    return fail(HRQHD_ERR_CONFIG, e.what());
  } catch (const VacuumError &e) {
    return fail(HRQHD_ERR_VACUUM, e.what());
  } catch (const UnstableStepError &e) {
    return fail(HRQHD_ERR_UNSTABLE, e.what());
  } catch (const DecodeError &e) {
    return fail(HRQHD_ERR_DECODE, e.what());
  } catch (const PreconditionError &e) {
    return fail(HRQHD_ERR_PRECONDITION, e.what());
  } catch (const IncompatibleSourceError &e) {
    return fail(HRQHD_ERR_PRECONDITION, e.what());
  } catch (const std::filesystem::filesystem_error &e) {
    return fail(HRQHD_ERR_IO, e.what());
  } catch (const Error &e) {
    return fail(HRQHD_ERR_IO, e.what());
  } catch (const std::bad_alloc &) {
    return fail(HRQHD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(HRQHD_ERR_INTERNAL, e.what());
  }
}

// Renders the map back to text so overrides go through the same parser.
std::string to_text(const std::map<std::string, std::string> &kv) {
  std::string t;
  for (const auto &[k, v] : kv)
    t += k + " = \"" + v + "\"\n";
  return t;
}

} // namespace

extern "C" {

const char *hrqhd_version(void) { return "1.0.0"; }

const char *hrqhd_last_error(void) { return g_last_error.c_str(); }

hrqhd_status hrqhd_set_threads(int n) {
  if (n < 0)
    return fail(HRQHD_ERR_ARGUMENT, "thread count must be >= 0");
  set_worker_count(n);
  return HRQHD_OK;
}

hrqhd_status hrqhd_config_parse(const char *text, hrqhd_config **out) {
  if (!text || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto c = std::make_unique<hrqhd_config>();
    c->kv = io::parse_key_values(text);
    c->cfg = io::parse_config(text);
    *out = c.release();
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_config_load(const char *path, hrqhd_config **out) {
  if (!path || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream f(path);
    if (!f)
      throw ConfigError(std::string("cannot read config file ") + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    auto c = std::make_unique<hrqhd_config>();
    c->kv = io::parse_key_values(ss.str());
    c->cfg = io::parse_config(ss.str());
    *out = c.release();
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_config_set(hrqhd_config *c, const char *key, const char *value) {
  if (!c || !key || !value)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto kv = c->kv;
    kv[key] = value;
    c->cfg = io::parse_config(to_text(kv));
    c->kv = std::move(kv);
    return HRQHD_OK;
  });
}

const char *hrqhd_config_render(hrqhd_config *c) {
  if (!c)
    return "";
  c->rendered = io::render_config(c->cfg);
  return c->rendered.c_str();
}

const char *hrqhd_config_output_dir(const hrqhd_config *c) { return c ? c->cfg.output.dir.c_str() : ""; }

void hrqhd_config_free(hrqhd_config *c) { delete c; }

hrqhd_status hrqhd_simulate(const hrqhd_config *c, const char *out_dir, int verbose, hrqhd_run **out) {
  if (!c || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto r = std::make_unique<hrqhd_run>();
    r->out = io::simulate(c->cfg, out_dir ? std::string(out_dir) : c->cfg.output.dir, verbose ? &std::cerr : nullptr);
    *out = r.release();
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_run_get_summary(const hrqhd_run *r, hrqhd_run_summary *s) {
  if (!r || !s)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  const auto &res = r->out.result;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  *s = hrqhd_run_summary{};
  s->exit_code = r->out.exit_code;
  s->iterations = res.iterations;
  s->final_low_norm = res.log.rows.empty() ? nan : res.log.rows.back().norm.total;
  s->last_ratio = res.log.rows.empty() ? nan : res.log.rows.back().ratio;
  s->M_star = res.M_star;
  s->T0 = res.T0;
  s->T = res.T;
  s->dt = res.dt;
  s->frak_C = res.frak_C;
  s->min_rho_tilde = res.min_rho_tilde;
  s->positivity_floor = res.positivity_floor;
  s->equivalence_rho = res.equivalence.max_rho;
  s->equivalence_S = res.equivalence.max_S;
  s->equivalence_lap = res.equivalence.max_lap;
  s->reduced_wave_rho = res.reduced.wave_rho;
  s->reduced_wave_S = res.reduced.wave_S;
  s->reduced_poisson = res.reduced.poisson;
  s->budget_wave_rho = res.reduced.budget_rho;
  s->budget_wave_S = res.reduced.budget_S;
  s->budget_poisson = res.reduced.budget_poisson;
  s->equivalence_pass = res.equivalence.pass;
  s->reduced_pass = res.reduced.pass;
  s->source_bounds_pass = res.source_bounds.pass;
  s->membership = res.membership;
  s->vacuum_t = res.vac_t;
  s->vacuum_x = res.vac_x;
  s->vacuum_y = res.vac_y;
  s->vacuum_tau = res.vac_tau;
  s->vacuum_value = res.vac_value;
  s->seconds = r->out.seconds;
  return HRQHD_OK;
}

size_t hrqhd_run_ratio_count(const hrqhd_run *r) { return r ? r->out.result.log.rows.size() : 0; }

double hrqhd_run_ratio(const hrqhd_run *r, size_t i) {
  if (!r || i >= r->out.result.log.rows.size())
    return std::numeric_limits<double>::quiet_NaN();
  return r->out.result.log.rows[i].ratio;
}

void hrqhd_run_free(hrqhd_run *r) { delete r; }

size_t hrqhd_suite_count(void) { return verify::suite_names().size(); }

const char *hrqhd_suite_name(size_t i) {
  const auto &n = verify::suite_names();
  return i < n.size() ? n[i].c_str() : nullptr;
}

hrqhd_status hrqhd_verify(const char *suite, hrqhd_suite_report **out) {
  if (!suite || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto r = std::make_unique<hrqhd_suite_report>();
    r->report = verify::run_suite(suite);
    r->table = r->report.table();
    *out = r.release();
    return HRQHD_OK;
  });
}

int hrqhd_suite_passed(const hrqhd_suite_report *r) { return r && r->report.pass() ? 1 : 0; }

double hrqhd_suite_seconds(const hrqhd_suite_report *r) { return r ? r->report.seconds : 0.0; }

const char *hrqhd_suite_table(const hrqhd_suite_report *r) { return r ? r->table.c_str() : ""; }

size_t hrqhd_suite_row_count(const hrqhd_suite_report *r) { return r ? r->report.rows.size() : 0; }

hrqhd_status hrqhd_suite_row(const hrqhd_suite_report *r, size_t i, hrqhd_check_row *out) {
  if (!r || !out || i >= r->report.rows.size())
    return fail(HRQHD_ERR_ARGUMENT, "row index out of range");
  const auto &row = r->report.rows[i];
  out->name = row.name.c_str();
  out->value = row.value;
  out->threshold = row.threshold;
  out->relation = row.relation == verify::Relation::AtMost    ? HRQHD_AT_MOST
                  : row.relation == verify::Relation::AtLeast ? HRQHD_AT_LEAST
                                                              : HRQHD_INFO;
  out->pass = row.pass;
  return HRQHD_OK;
}

void hrqhd_suite_free(hrqhd_suite_report *r) { delete r; }

hrqhd_status hrqhd_spectrum(double lambda, int n_max, int n_herm, double *levels, double *reference) {
  if (!levels || !reference)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  if (lambda == 0 || !std::isfinite(lambda))
    return fail(HRQHD_ERR_ARGUMENT, "lambda must be finite and nonzero");
  if (n_max < 0 || 2 * n_max >= n_herm)
    return fail(HRQHD_ERR_ARGUMENT, "need 0 <= n_max < n_herm / 2");
  return guarded([&] {
    const auto b = spectral::build_eigenbasis(lambda, n_herm);
    const auto distinct = spectral::degenerate_levels(b.eigenvalues());
    if (int(distinct.size()) <= n_max)
      throw PreconditionError("spectrum: fewer distinct levels than requested");
    for (int n = 0; n <= n_max; ++n) {
      levels[n] = distinct[n];
      reference[n] = (2 * n + 1) * std::abs(lambda);
    }
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_snapshot_open(const char *path, hrqhd_snapshot **out) {
  if (!path || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = std::make_unique<hrqhd_snapshot>();
    s->snap = io::read_snapshot(path);
    *out = s.release();
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_snapshot_create(int nx, int ny, int ntau, double Lx, double Ly, double Ltau, double time,
                                   hrqhd_snapshot **out) {
  if (!out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = std::make_unique<hrqhd_snapshot>();
    s->snap.grid = Grid3(nx, ny, ntau, Lx, Ly, Ltau);
    s->snap.time = time;
    *out = s.release();
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_snapshot_get_info(const hrqhd_snapshot *s, hrqhd_snapshot_info *out) {
  if (!s || !out)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  const Grid3 &g = s->snap.grid;
  *out = hrqhd_snapshot_info{io::Snapshot::version, g.nx, g.ny, g.ntau, g.Lx, g.Ly, g.Ltau, s->snap.time,
                             s->snap.fields.size()};
  return HRQHD_OK;
}

hrqhd_status hrqhd_snapshot_field(const hrqhd_snapshot *s, size_t i, const char **name, int *is_complex,
                                  const double **data, size_t *count) {
  if (!s || i >= s->snap.fields.size())
    return fail(HRQHD_ERR_ARGUMENT, "field index out of range");
  const auto &f = s->snap.fields[i];
  if (name)
    *name = f.name.c_str();
  if (is_complex)
    *is_complex = f.complex;
  if (data)
    *data = f.data.data();
  if (count)
    *count = f.data.size();
  return HRQHD_OK;
}

hrqhd_status hrqhd_snapshot_add_real(hrqhd_snapshot *s, const char *name, const double *data) {
  if (!s || !name || !data)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const Grid3 &g = s->snap.grid;
    s->snap.add(name, ScalarField(g, std::vector<double>(data, data + g.size())));
    return HRQHD_OK;
  });
}

hrqhd_status hrqhd_snapshot_save(const hrqhd_snapshot *s, const char *path) {
  if (!s || !path)
    return fail(HRQHD_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    io::write_snapshot(path, s->snap);
    return HRQHD_OK;
  });
}

void hrqhd_snapshot_free(hrqhd_snapshot *s) { delete s; }

const char *hrqhd_csv_columns(void) {
  static const std::string help = io::csv_columns_help();
  return help.c_str();
}

} // extern "C"
