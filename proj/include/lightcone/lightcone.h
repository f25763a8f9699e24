#ifndef LIGHTCONE_LIGHTCONE_H
#define LIGHTCONE_LIGHTCONE_H

#include <stddef.h>

#if defined(_WIN32)
#define LC_API __declspec(dllexport)
#else
#define LC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum lc_status {
  LC_OK = 0,
  LC_VERIFY_FAILED = 1,
  LC_SCHEMA = 2,
  LC_GEOMETRY = 3,
  LC_GUARD = 4,
  LC_CALIBRATION = 5,
  LC_INVALID_ARGUMENT = 6,
  LC_IO = 7,
  LC_INTERNAL = 8
} lc_status;

typedef struct lc_config lc_config;
typedef struct lc_report lc_report;

LC_API const char* lc_version(void);
LC_API const char* lc_status_name(int status);
/* Message of the last failing call on this thread; "" when none. */
LC_API const char* lc_last_error(void);

LC_API int lc_config_new(lc_config** out);
LC_API int lc_config_load(const char* path, lc_config** out);
LC_API int lc_config_from_json(const char* json, lc_config** out);
LC_API void lc_config_free(lc_config* cfg);
/* Keys: n, length, dt, t_end, scheme, diff, seed, calibration, outputs, substeps. */
LC_API int lc_config_set(lc_config* cfg, const char* key, const char* value);
/* "KEY=VAL" with KEY a known tolerance name. */
LC_API int lc_config_set_tolerance(lc_config* cfg, const char* assignment);
/* Canonical JSON; owned by cfg, valid until the next call on cfg. */
LC_API const char* lc_config_json(lc_config* cfg);
LC_API const char* lc_config_hash(lc_config* cfg);

/* space is "cone" or "sphere". Writes the invariants CSV to output and a
   sidecar <output>.json with frame residuals and closed-form deviations. */
LC_API int lc_cmd_invariants(const lc_config* cfg, const char* input, const char* space, const char* output,
                             lc_report** report);
/* Sphere CSV to arc-length cone lift, and back. */
LC_API int lc_cmd_lift(const lc_config* cfg, const char* input, const char* output, lc_report** report);
LC_API int lc_cmd_project(const lc_config* cfg, const char* input, const char* output, lc_report** report);
/* kind is "kdv" or "curve". input may be NULL to use the configured initial
   condition; space selects how input is read ("cone", "sphere", or "invariants").
   Writes t_NNNNNN.csv per output time and summary.json into output_dir. */
LC_API int lc_cmd_flow(const lc_config* cfg, const char* kind, const char* input, const char* space,
                       const char* output_dir, lc_report** report);
/* rho0 is "identity", "chart", or a path to a JSON 4x4 matrix. Writes the
   curve CSV to output and the monodromy/round-trip report to <output>.json. */
LC_API int lc_cmd_reconstruct(const lc_config* cfg, const char* invariants, const char* rho0, int assume_unit_speed,
                              const char* output, lc_report** report);
/* output may be NULL. Returns LC_VERIFY_FAILED when any check fails. */
LC_API int lc_cmd_verify(const lc_config* cfg, const char* suite, const char* output, lc_report** report);
/* curves is a comma-separated list of built-in curve names or NULL for the
   full suite; ns likewise ("128,256,512" when NULL). */
LC_API int lc_cmd_calibrate(const lc_config* cfg, const char* curves, const char* ns, const char* output,
                            lc_report** report);

/* Report JSON and a short human-readable summary. Owned by the report. */
LC_API const char* lc_report_json(const lc_report* report);
LC_API const char* lc_report_summary(const lc_report* report);
LC_API void lc_report_free(lc_report* report);

#ifdef __cplusplus
}
#endif

#endif
