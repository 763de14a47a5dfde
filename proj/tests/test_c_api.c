/* Exercises the C interface the command-line tool links against. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mspec/mspec.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(int argc, char** argv) {
  const char* out = argc > 1 ? argv[1] : "c_api_out";
  const double pi = 3.14159265358979323846;

  EXPECT(strcmp(mspec_version(), "1.0.0") == 0);
  EXPECT(strcmp(mspec_status_string(MSPEC_OK), "ok") == 0);

  mspec_config* cfg = NULL;
  EXPECT(mspec_config_parse("domain.type = interval\ngrid.h = 1/512\nmoments.n_max = 9\n", &cfg) == MSPEC_OK);

  char* value = NULL;
  EXPECT(mspec_config_get(cfg, "grid.h", &value) == MSPEC_OK);
  EXPECT(value && strcmp(value, "0.001953125") == 0);
  mspec_string_free(value);

  EXPECT(mspec_config_set(cfg, "grid.spacing", "1") == MSPEC_ERR_PARSE);
  EXPECT(strstr(mspec_last_error(), "grid.spacing") != NULL);
  EXPECT(mspec_config_set(cfg, "run.pipeline", "verify") == MSPEC_OK);

  mspec_config* bad = NULL;
  EXPECT(mspec_config_parse("grid.h = 1\ngrid.h = 2\n", &bad) == MSPEC_ERR_PARSE);
  EXPECT(bad == NULL);
  EXPECT(strstr(mspec_last_error(), "line 2") != NULL);

  /* analytic moments and their inversion */
  mspec_moments* ms = NULL;
  EXPECT(mspec_moments_analytic(cfg, &ms) == MSPEC_OK);
  EXPECT(mspec_moments_count(ms) == 10);
  double A = 0, mu = 0;
  EXPECT(mspec_moments_get(ms, 1, &A, &mu) == MSPEC_OK);
  EXPECT(fabs(A - 1.0 / 6) < 1e-15);
  EXPECT(mspec_moments_get(ms, 10, &A, &mu) == MSPEC_ERR_INVALID_ARGUMENT);

  mspec_measure* m = NULL;
  EXPECT(mspec_invert(ms, 5, 1, &m) == MSPEC_OK);
  EXPECT(mspec_measure_count(m) == 5);
  double lambda = 0, a2 = 0;
  EXPECT(mspec_measure_atom(m, 0, &lambda, &a2) == MSPEC_OK);
  EXPECT(fabs(lambda / (pi * pi) - 1) < 1e-10);
  EXPECT(fabs(a2 / (8 / (pi * pi)) - 1) < 1e-10);
  mspec_measure_free(m);
  EXPECT(mspec_invert(ms, 6, 1, &m) == MSPEC_ERR_INVALID_ARGUMENT);
  mspec_moments_free(ms);

  /* discrete moments */
  EXPECT(mspec_moments_pde(cfg, &ms) == MSPEC_OK);
  EXPECT(mspec_moments_get(ms, 1, &A, &mu) == MSPEC_OK);
  EXPECT(fabs(A - 1.0 / 6) < 1e-4);
  mspec_moments_free(ms);

  /* a full pipeline run */
  char* report = NULL;
  mspec_run_options opts = {1, 0, 0};
  EXPECT(mspec_run(cfg, out, &opts, &report) == MSPEC_OK);
  EXPECT(report && strstr(report, "\"passed\": true") != NULL);
  mspec_string_free(report);

  char manifest[4096];
  char replay_dir[4096];
  snprintf(manifest, sizeof manifest, "%s/manifest.json", out);
  snprintf(replay_dir, sizeof replay_dir, "%s/replay", out);
  int reproduced = 0;
  EXPECT(mspec_replay(manifest, replay_dir, NULL, &reproduced) == MSPEC_OK);
  EXPECT(reproduced == 1);

  EXPECT(mspec_moments_read("/nonexistent/moments.csv", &ms) == MSPEC_ERR_IO);
  EXPECT(mspec_config_load("/nonexistent/run.cfg", &bad) == MSPEC_ERR_IO);

  mspec_config_free(cfg);
  mspec_config_free(NULL);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
