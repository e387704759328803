#ifndef CKNLAB_H
#define CKNLAB_H

/* C interface to the cknlab library. Handles are opaque; every call that can
 * fail returns a cknlab_status and leaves a message retrievable with
 * cknlab_last_error() on the calling thread. */

#include <stddef.h>

#if defined(_WIN32)
#define CKNLAB_API __declspec(dllexport)
#else
#define CKNLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cknlab_status {
  CKNLAB_OK = 0,
  CKNLAB_E_USAGE = 1,
  CKNLAB_E_PRECONDITION = 2,
  CKNLAB_E_NONCONVERGENCE = 3,
  CKNLAB_E_CONSISTENCY = 4,
  CKNLAB_E_IO = 5,
  CKNLAB_E_INTERNAL = 6
} cknlab_status;

typedef struct cknlab_config cknlab_config;
typedef struct cknlab_report cknlab_report;

CKNLAB_API const char* cknlab_version(void);

/* Message of the last failed call on this thread ("" if none). */
CKNLAB_API const char* cknlab_last_error(void);

/* Run configuration. Keys are the long flag names without dashes:
 * command, n, alpha, beta, k, kmax, basis, a, b, seed, jobs, format, out,
 * rel-tol, max-level, split-point, formula, family, test-function, coeffs. */
CKNLAB_API cknlab_status cknlab_config_create(cknlab_config** out);
CKNLAB_API void cknlab_config_destroy(cknlab_config* cfg);
CKNLAB_API cknlab_status cknlab_config_set(cknlab_config* cfg, const char* key, const char* value);
/* Flat key = value file; later cknlab_config_set calls override it. */
CKNLAB_API cknlab_status cknlab_config_load_file(cknlab_config* cfg, const char* path);

/* Runs the configured command. On CKNLAB_OK *out holds a report whose own
 * status may still flag non-convergence or a discrepancy. */
CKNLAB_API cknlab_status cknlab_run(const cknlab_config* cfg, cknlab_report** out);
CKNLAB_API void cknlab_report_destroy(cknlab_report* report);

/* Exit code the report maps to (0, 3 or 4). */
CKNLAB_API int cknlab_report_status(const cknlab_report* report);

/* Rendering in "json", "csv" or "plot-data" (NULL: the configured format).
 * The string is owned by the report and valid until the next render call or
 * until the report is destroyed. */
CKNLAB_API const char* cknlab_report_render(cknlab_report* report, const char* format);

/* Output path from the configuration ("" for standard output). */
CKNLAB_API const char* cknlab_report_output_path(const cknlab_report* report);

/* Renders and writes atomically (temporary file, then rename). */
CKNLAB_API cknlab_status cknlab_report_write(cknlab_report* report, const char* path, const char* format);

CKNLAB_API size_t cknlab_report_warning_count(const cknlab_report* report);
CKNLAB_API const char* cknlab_report_warning(const cknlab_report* report, size_t i);

/* Numeric entry points. */
CKNLAB_API cknlab_status cknlab_gamma(double t, double* out);
CKNLAB_API cknlab_status cknlab_weighted_exp_integral(double p, double c, double q, double* out);
CKNLAB_API cknlab_status cknlab_sharp_constant(int n, double alpha, double* out);
CKNLAB_API cknlab_status cknlab_mode_quotient_j(int n, int k, double* out);
CKNLAB_API cknlab_status cknlab_mode_quotient_k(int n, double alpha, int k, double* out);
CKNLAB_API cknlab_status cknlab_test_function_quotient(int n, double* out);
CKNLAB_API cknlab_status cknlab_extremal_quotient(const char* family, int n, double alpha, double a, double b,
                                                  int k, double* out);

/* Acceptance suite. The callback (may be NULL) receives one line per
 * criterion; *failed receives the number of failing criteria. */
typedef void (*cknlab_line_fn)(const char* line, void* user);
CKNLAB_API cknlab_status cknlab_selftest(cknlab_line_fn fn, void* user, int* failed);

#ifdef __cplusplus
}
#endif

#endif /* CKNLAB_H */
