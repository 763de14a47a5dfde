/* C interface to the mspec library. All handles are opaque; every call
 * that can fail returns an mspec_status and leaves a message retrievable
 * with mspec_last_error() on the calling thread. Strings returned through
 * char** out-parameters are released with mspec_string_free(). */
#ifndef MSPEC_H
#define MSPEC_H

#include <stddef.h>

#if defined(MSPEC_BUILDING_LIBRARY)
#define MSPEC_API __attribute__((visibility("default")))
#else
#define MSPEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mspec_status {
  MSPEC_OK = 0,
  MSPEC_ERR_INVALID_ARGUMENT = 1,
  MSPEC_ERR_INVALID_DOMAIN = 2,
  MSPEC_ERR_GRID_TOO_COARSE = 3,
  MSPEC_ERR_NOT_CONVERGED = 4,
  MSPEC_ERR_NOT_STIELTJES = 5,
  MSPEC_ERR_RANK_DEFICIENT = 6,
  MSPEC_ERR_NEGATIVE_WEIGHT = 7,
  MSPEC_ERR_INSUFFICIENT_SAMPLES = 8,
  MSPEC_ERR_PARSE = 9,
  MSPEC_ERR_IO = 10,
  MSPEC_ERR_UNSUPPORTED = 11,
  MSPEC_ERR_CHECK_FAILED = 12,
  MSPEC_ERR_INTERNAL = 99
} mspec_status;

typedef struct mspec_config mspec_config;
typedef struct mspec_moments mspec_moments;
typedef struct mspec_measure mspec_measure;

typedef struct mspec_run_options {
  int strict;
  int dump_matrix;
  int dump_grid;
} mspec_run_options;

MSPEC_API const char* mspec_version(void);
MSPEC_API const char* mspec_status_string(mspec_status status);
MSPEC_API const char* mspec_last_error(void);
MSPEC_API void mspec_string_free(char* s);

/* Run configuration: `section.key = value` lines. */
MSPEC_API mspec_status mspec_config_new(mspec_config** out);
MSPEC_API mspec_status mspec_config_parse(const char* text, mspec_config** out);
MSPEC_API mspec_status mspec_config_load(const char* path, mspec_config** out);
MSPEC_API mspec_status mspec_config_set(mspec_config* cfg, const char* key, const char* value);
MSPEC_API mspec_status mspec_config_get(const mspec_config* cfg, const char* key, char** value);
MSPEC_API mspec_status mspec_config_emit(const mspec_config* cfg, char** text);
MSPEC_API void mspec_config_free(mspec_config* cfg);

/* Pipelines. report_json may be NULL. */
MSPEC_API mspec_status mspec_run(const mspec_config* cfg, const char* out_dir, const mspec_run_options* options,
                                 char** report_json);
MSPEC_API mspec_status mspec_compare_files(const char* spectrum_a, const char* spectrum_b, double tol, double zero_tol,
                                           char** report_json, int* all_matched);
MSPEC_API mspec_status mspec_replay(const char* manifest, const char* out_dir, char** report_json, int* reproduced);

/* Exit-time moment sequences. */
MSPEC_API mspec_status mspec_moments_pde(const mspec_config* cfg, mspec_moments** out);
MSPEC_API mspec_status mspec_moments_analytic(const mspec_config* cfg, mspec_moments** out);
MSPEC_API mspec_status mspec_moments_read(const char* path, mspec_moments** out);
MSPEC_API size_t mspec_moments_count(const mspec_moments* ms);
MSPEC_API mspec_status mspec_moments_get(const mspec_moments* ms, size_t n, double* A, double* mu);
MSPEC_API void mspec_moments_free(mspec_moments* ms);

/* Stieltjes inversion; atoms are reported as (lambda = 2/x, a2 = w) in
 * increasing lambda. */
MSPEC_API mspec_status mspec_invert(const mspec_moments* ms, int p, int extended, mspec_measure** out);
MSPEC_API size_t mspec_measure_count(const mspec_measure* m);
MSPEC_API mspec_status mspec_measure_atom(const mspec_measure* m, size_t i, double* lambda, double* a2);
MSPEC_API void mspec_measure_free(mspec_measure* m);

#ifdef __cplusplus
}
#endif

#endif
