/* Exercises the shared library through its C header only. */
#include "hrqhd/hrqhd.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                                                                   \
  do {                                                                                                                 \
    if (!(cond)) {                                                                                                     \
      fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, __LINE__, #cond, hrqhd_last_error());      \
      ++failures;                                                                                                      \
    }                                                                                                                  \
  } while (0)

static void test_errors(void) {
  hrqhd_config *c = NULL;
  EXPECT(hrqhd_config_parse(NULL, &c) == HRQHD_ERR_ARGUMENT);
  EXPECT(hrqhd_config_parse("[grid]\nbogus = 1\n", &c) == HRQHD_ERR_CONFIG);
  EXPECT(strstr(hrqhd_last_error(), "grid.bogus") != NULL);
  EXPECT(hrqhd_config_load("/nonexistent/file.cfg", &c) == HRQHD_ERR_CONFIG);
  EXPECT(hrqhd_set_threads(-1) == HRQHD_ERR_ARGUMENT);
  EXPECT(hrqhd_set_threads(0) == HRQHD_OK);
}

static void test_config(void) {
  hrqhd_config *c = NULL;
  EXPECT(hrqhd_config_parse("[grid]\nnx = 20\n[output]\ndir = somewhere\n", &c) == HRQHD_OK);
  EXPECT(strcmp(hrqhd_config_output_dir(c), "somewhere") == 0);
  EXPECT(hrqhd_config_set(c, "grid.ny", "22") == HRQHD_OK);
  EXPECT(strstr(hrqhd_config_render(c), "ny = 22") != NULL);
  EXPECT(strstr(hrqhd_config_render(c), "nx = 20") != NULL);
  EXPECT(hrqhd_config_set(c, "grid.nope", "1") == HRQHD_ERR_CONFIG);
  /* a rejected override leaves the config unchanged */
  EXPECT(strstr(hrqhd_config_render(c), "nope") == NULL);
  hrqhd_config_free(c);
}

static void test_suites(void) {
  size_t n = hrqhd_suite_count();
  EXPECT(n == 8);
  int found = 0;
  for (size_t i = 0; i < n; ++i)
    found += strcmp(hrqhd_suite_name(i), "geometry") == 0;
  EXPECT(found == 1);
  EXPECT(hrqhd_suite_name(n) == NULL);
  hrqhd_suite_report *r = NULL;
  EXPECT(hrqhd_verify("nonsense", &r) == HRQHD_ERR_CONFIG);
  EXPECT(strstr(hrqhd_last_error(), "identity210") != NULL);
  EXPECT(hrqhd_verify("geometry", &r) == HRQHD_OK);
  EXPECT(hrqhd_suite_passed(r));
  EXPECT(hrqhd_suite_row_count(r) > 0);
  hrqhd_check_row row;
  EXPECT(hrqhd_suite_row(r, 0, &row) == HRQHD_OK);
  EXPECT(row.pass && row.name && row.name[0]);
  EXPECT(hrqhd_suite_row(r, 10000, &row) == HRQHD_ERR_ARGUMENT);
  hrqhd_suite_free(r);
}

static void test_spectrum(void) {
  double lev[4], ref[4];
  EXPECT(hrqhd_spectrum(2.0, 3, 24, lev, ref) == HRQHD_OK);
  for (int k = 0; k < 4; ++k) {
    EXPECT(ref[k] == (2 * k + 1) * 2.0);
    EXPECT(fabs(lev[k] - ref[k]) <= 1e-8 * ref[k]);
  }
  EXPECT(hrqhd_spectrum(0.0, 3, 24, lev, ref) == HRQHD_ERR_ARGUMENT);
  EXPECT(hrqhd_spectrum(1.0, 12, 24, lev, ref) == HRQHD_ERR_ARGUMENT);
}

static void test_snapshot(const char *dir) {
  char path[1024];
  snprintf(path, sizeof path, "%s/capi_snapshot.hrqhd", dir);
  hrqhd_snapshot *s = NULL;
  EXPECT(hrqhd_snapshot_create(4, 3, 8, 1.0, 2.0, 3.0, 0.5, &s) == HRQHD_OK);
  double data[96];
  for (int i = 0; i < 96; ++i)
    data[i] = 0.1 * i - 2.0;
  EXPECT(hrqhd_snapshot_add_real(s, "n0", data) == HRQHD_OK);
  EXPECT(hrqhd_snapshot_save(s, path) == HRQHD_OK);
  hrqhd_snapshot_free(s);

  EXPECT(hrqhd_snapshot_open(path, &s) == HRQHD_OK);
  hrqhd_snapshot_info info;
  EXPECT(hrqhd_snapshot_get_info(s, &info) == HRQHD_OK);
  EXPECT(info.version == 1 && info.nx == 4 && info.ny == 3 && info.ntau == 8);
  EXPECT(info.Ltau == 3.0 && info.time == 0.5 && info.field_count == 1);
  const char *name = NULL;
  int cplx = -1;
  const double *d = NULL;
  size_t count = 0;
  EXPECT(hrqhd_snapshot_field(s, 0, &name, &cplx, &d, &count) == HRQHD_OK);
  EXPECT(strcmp(name, "n0") == 0 && cplx == 0 && count == 96);
  EXPECT(memcmp(d, data, sizeof data) == 0);
  hrqhd_snapshot_free(s);

  /* corrupt the magic */
  FILE *f = fopen(path, "r+b");
  EXPECT(f != NULL);
  if (f) {
    fputc('Z', f);
    fclose(f);
  }
  EXPECT(hrqhd_snapshot_open(path, &s) == HRQHD_ERR_DECODE);
  EXPECT(strstr(hrqhd_last_error(), "magic") != NULL);
  remove(path);
}

static void test_simulate(const char *dir) {
  hrqhd_config *c = NULL;
  const char *text = "[grid]\nnx = 24\nny = 24\nntau = 16\nLx = 6\nLy = 6\nLtau = 6\n"
                     "[init]\nkind = constant\n[iteration]\nT_final = 0.2\ndt = 0.05\n"
                     "[solver]\nn_herm = 8\nquadrature = linear\n";
  EXPECT(hrqhd_config_parse(text, &c) == HRQHD_OK);
  char out[1024];
  snprintf(out, sizeof out, "%s/capi_stationary", dir);
  hrqhd_run *r = NULL;
  EXPECT(hrqhd_simulate(c, out, 0, &r) == HRQHD_OK);
  hrqhd_run_summary s;
  EXPECT(hrqhd_run_get_summary(r, &s) == HRQHD_OK);
  EXPECT(s.exit_code == 0 && s.iterations == 1 && s.final_low_norm == 0.0);
  EXPECT(hrqhd_run_ratio_count(r) == 1 && isnan(hrqhd_run_ratio(r, 0)));
  hrqhd_run_free(r);

  EXPECT(hrqhd_config_set(c, "init.kind", "gaussian") == HRQHD_OK);
  EXPECT(hrqhd_config_set(c, "init.amplitude", "-0.9") == HRQHD_OK);
  EXPECT(hrqhd_simulate(c, out, 0, &r) == HRQHD_OK);
  EXPECT(hrqhd_run_get_summary(r, &s) == HRQHD_OK);
  EXPECT(s.exit_code == 3 && s.vacuum_value < 0.25);
  hrqhd_run_free(r);

  EXPECT(hrqhd_config_set(c, "physics.epsilon", "0.5") == HRQHD_OK);
  EXPECT(hrqhd_simulate(c, out, 0, &r) == HRQHD_ERR_CONFIG);
  EXPECT(strstr(hrqhd_last_error(), "physics.epsilon") != NULL);
  hrqhd_config_free(c);
}

int main(int argc, char **argv) {
  const char *dir = argc > 1 ? argv[1] : ".";
  EXPECT(strlen(hrqhd_version()) > 0);
  EXPECT(strstr(hrqhd_csv_columns(), "contraction.csv") != NULL);
  test_errors();
  test_config();
  test_suites();
  test_spectrum();
  test_snapshot(dir);
  test_simulate(dir);
  if (failures)
    fprintf(stderr, "%d expectation(s) failed\n", failures);
  else
    printf("C API: all expectations met\n");
  return failures ? 1 : 0;
}
