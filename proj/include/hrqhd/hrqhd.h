/* C interface of the hrqhd shared library. Every call returns a status code;
 * on failure hrqhd_last_error() describes the problem (per thread). Handles
 * are opaque and released with the matching _free function. */
#ifndef HRQHD_H
#define HRQHD_H

#include <stddef.h>

#if defined(HRQHD_BUILDING_LIBRARY)
#define HRQHD_API __attribute__((visibility("default")))
#else
#define HRQHD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hrqhd_status {
  HRQHD_OK = 0,
  HRQHD_ERR_ARGUMENT = 1,     /* null or out-of-range argument */
  HRQHD_ERR_CONFIG = 2,       /* invalid configuration, message names the key */
  HRQHD_ERR_PRECONDITION = 3, /* data or grid unsuitable for the operation */
  HRQHD_ERR_DECODE = 4,       /* malformed file */
  HRQHD_ERR_VACUUM = 5,
  HRQHD_ERR_UNSTABLE = 6,
  HRQHD_ERR_IO = 7,
  HRQHD_ERR_INTERNAL = 8
} hrqhd_status;

HRQHD_API const char *hrqhd_version(void);
/* Message of the last failed call on this thread ("" if none). */
HRQHD_API const char *hrqhd_last_error(void);
/* Caps worker threads; 0 restores the HRQHD_THREADS default. */
HRQHD_API hrqhd_status hrqhd_set_threads(int n);

/* ---- configuration ---- */
typedef struct hrqhd_config hrqhd_config;

HRQHD_API hrqhd_status hrqhd_config_load(const char *path, hrqhd_config **out);
HRQHD_API hrqhd_status hrqhd_config_parse(const char *text, hrqhd_config **out);
/* Overrides one dotted key, e.g. ("iteration.dt", "0.01"). */
HRQHD_API hrqhd_status hrqhd_config_set(hrqhd_config *c, const char *key, const char *value);
/* Canonical text of every setting; valid until the next call on c. */
HRQHD_API const char *hrqhd_config_render(hrqhd_config *c);
HRQHD_API const char *hrqhd_config_output_dir(const hrqhd_config *c);
HRQHD_API void hrqhd_config_free(hrqhd_config *c);

/* ---- simulation ---- */
typedef struct hrqhd_run hrqhd_run;

typedef struct hrqhd_run_summary {
  int exit_code; /* 0 converged, 2 non-contraction, 3 vacuum */
  int iterations;
  double final_low_norm;
  double last_ratio;
  double M_star, T0, T, dt, frak_C;
  double min_rho_tilde, positivity_floor;
  double equivalence_rho, equivalence_S, equivalence_lap;
  double reduced_wave_rho, reduced_wave_S, reduced_poisson;
  double budget_wave_rho, budget_wave_S, budget_poisson;
  int equivalence_pass, reduced_pass, source_bounds_pass, membership;
  double vacuum_t, vacuum_x, vacuum_y, vacuum_tau, vacuum_value;
  double seconds;
} hrqhd_run_summary;

/* Runs the Picard solver and writes the run directory (out_dir, or the
 * config's output.dir when NULL). verbose != 0 logs progress to stderr.
 * Convergence failures are results, not errors: inspect exit_code. */
HRQHD_API hrqhd_status hrqhd_simulate(const hrqhd_config *c, const char *out_dir, int verbose, hrqhd_run **out);
HRQHD_API hrqhd_status hrqhd_run_get_summary(const hrqhd_run *r, hrqhd_run_summary *out);
HRQHD_API size_t hrqhd_run_ratio_count(const hrqhd_run *r);
/* Contraction ratio of row i (NaN for the first row). */
HRQHD_API double hrqhd_run_ratio(const hrqhd_run *r, size_t i);
HRQHD_API void hrqhd_run_free(hrqhd_run *r);

/* ---- verification suites ---- */
typedef struct hrqhd_suite_report hrqhd_suite_report;

typedef enum hrqhd_relation { HRQHD_AT_MOST = 0, HRQHD_AT_LEAST = 1, HRQHD_INFO = 2 } hrqhd_relation;

typedef struct hrqhd_check_row {
  const char *name;
  double value;
  double threshold;
  hrqhd_relation relation;
  int pass;
} hrqhd_check_row;

HRQHD_API size_t hrqhd_suite_count(void);
HRQHD_API const char *hrqhd_suite_name(size_t i);
HRQHD_API hrqhd_status hrqhd_verify(const char *suite, hrqhd_suite_report **out);
HRQHD_API int hrqhd_suite_passed(const hrqhd_suite_report *r);
HRQHD_API double hrqhd_suite_seconds(const hrqhd_suite_report *r);
HRQHD_API const char *hrqhd_suite_table(const hrqhd_suite_report *r);
HRQHD_API size_t hrqhd_suite_row_count(const hrqhd_suite_report *r);
HRQHD_API hrqhd_status hrqhd_suite_row(const hrqhd_suite_report *r, size_t i, hrqhd_check_row *out);
HRQHD_API void hrqhd_suite_free(hrqhd_suite_report *r);

/* ---- twisted Laplacian spectrum ----
 * Fills n_max + 1 entries: the n-th degenerate eigenvalue level of the
 * lambda-twisted Laplacian with n_herm Hermite functions per axis, and the
 * reference (2n + 1)|lambda|. */
HRQHD_API hrqhd_status hrqhd_spectrum(double lambda, int n_max, int n_herm, double *levels, double *reference);

/* ---- snapshots ---- */
typedef struct hrqhd_snapshot hrqhd_snapshot;

typedef struct hrqhd_snapshot_info {
  unsigned version;
  int nx, ny, ntau;
  double Lx, Ly, Ltau;
  double time;
  size_t field_count;
} hrqhd_snapshot_info;

HRQHD_API hrqhd_status hrqhd_snapshot_open(const char *path, hrqhd_snapshot **out);
HRQHD_API hrqhd_status hrqhd_snapshot_create(int nx, int ny, int ntau, double Lx, double Ly, double Ltau, double time,
                                             hrqhd_snapshot **out);
HRQHD_API hrqhd_status hrqhd_snapshot_get_info(const hrqhd_snapshot *s, hrqhd_snapshot_info *out);
/* data points to nx*ny*ntau samples (twice that, interleaved, when complex). */
HRQHD_API hrqhd_status hrqhd_snapshot_field(const hrqhd_snapshot *s, size_t i, const char **name, int *is_complex,
                                            const double **data, size_t *count);
/* Copies nx*ny*ntau real samples in tau-fastest order. */
HRQHD_API hrqhd_status hrqhd_snapshot_add_real(hrqhd_snapshot *s, const char *name, const double *data);
HRQHD_API hrqhd_status hrqhd_snapshot_save(const hrqhd_snapshot *s, const char *path);
HRQHD_API void hrqhd_snapshot_free(hrqhd_snapshot *s);

/* Column documentation of the CSV outputs. */
HRQHD_API const char *hrqhd_csv_columns(void);

#ifdef __cplusplus
}
#endif

#endif
