/* C interface to the monce tracking metrics library. */

#ifndef MONCE_H
#define MONCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call in this ABI.
typedef enum MonceStatus {
  // The call succeeded.
  MONCE_STATUS_OK = 0,
  // A required pointer argument was null.
  MONCE_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  MONCE_STATUS_INVALID_UTF8 = 2,
  // A file could not be read or parsed, or the config is invalid.
  MONCE_STATUS_INPUT_ERROR = 3,
  // The inputs parsed but could not be evaluated.
  MONCE_STATUS_EVAL_ERROR = 4,
  // A bug tripped an internal invariant; the library state is still
  // sound but the result is unavailable.
  MONCE_STATUS_INTERNAL_ERROR = 5,
} MonceStatus;

// Opaque evaluation result. Created by `monce_evaluate`, released by
// `monce_report_free`.
typedef struct MonceReport MonceReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Never null; do not
// free.
const char *monce_version(void);

// Message for the most recent failure on this thread, or null if no
// call has failed yet. Borrowed: valid until the next failing call on
// the same thread; do not free.
const char *monce_last_error_message(void);

// Evaluate a prediction CSV against a ground-truth CSV under both UID
// criteria and store a new report in `*out_report`.
//
// `config_path` may be null for default settings. On failure,
// `*out_report` is set to null and the status describes the problem.
//
// # Safety
// `gt_path` and `pred_path` must be valid NUL-terminated strings;
// `config_path` must be null or a valid NUL-terminated string;
// `out_report` must be a valid pointer to writable memory.
enum MonceStatus monce_evaluate(const char *gt_path,
                                const char *pred_path,
                                const char *config_path,
                                struct MonceReport **out_report);

// Serialize a report as pretty-printed JSON into a newly allocated
// string at `*out_json`. Release it with `monce_string_free`.
//
// # Safety
// `report` must be a live pointer from `monce_evaluate`; `out_json`
// must be a valid pointer to writable memory.
enum MonceStatus monce_report_json(const struct MonceReport *report, char **out_json);

// Expected average overlap of the report's summary criterion.
//
// # Safety
// `report` must be a live pointer from `monce_evaluate`; `out` must be
// a valid pointer to writable memory.
enum MonceStatus monce_report_eao(const struct MonceReport *report, double *out);

// Precision counterpart of the expected average overlap.
//
// # Safety
// `report` must be a live pointer from `monce_evaluate`; `out` must be
// a valid pointer to writable memory.
enum MonceStatus monce_report_eao_p(const struct MonceReport *report, double *out);

// Release a report from `monce_evaluate`. Null is a no-op.
//
// # Safety
// `report` must be null or a pointer previously returned by
// `monce_evaluate` that has not been freed yet.
void monce_report_free(struct MonceReport *report);

// Release a string from `monce_report_json`. Null is a no-op.
//
// # Safety
// `s` must be null or a pointer previously returned by
// `monce_report_json` that has not been freed yet.
void monce_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONCE_H */
