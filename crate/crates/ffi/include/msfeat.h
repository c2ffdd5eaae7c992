/* C interface for the microservice feature extractor. */

#ifndef MSFEAT_H
#define MSFEAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for all fallible entry points.
typedef enum msfeat_status {
  MSFEAT_OK = 0,
  // A required pointer argument was NULL.
  MSFEAT_NULL_ARG = 1,
  // A string argument was not valid UTF-8.
  MSFEAT_UTF8 = 2,
  MSFEAT_IO = 3,
  MSFEAT_PARSE = 4,
  MSFEAT_ANALYSIS = 5,
  MSFEAT_CONFIG = 6,
} msfeat_status;

// Extraction settings handle.
typedef struct msfeat_config msfeat_config;

// An analyzed set of per-service records.
typedef struct msfeat_records msfeat_records;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the library version as a static NUL-terminated string.
// Never NULL; do not free.
const char *msfeat_version(void);

// Returns the error message of the last failed call on this thread, or an
// empty string when no call has failed. The pointer stays valid until the
// next failing call on the same thread; do not free.
const char *msfeat_last_error_message(void);

// Creates a configuration with built-in defaults. Never fails.
// Free with `msfeat_config_free`.
struct msfeat_config *msfeat_config_default(void);

// Loads a `key = value` configuration file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum msfeat_status msfeat_config_load(const char *path, struct msfeat_config **out);

// Releases a configuration handle. NULL is a no-op.
//
// # Safety
// `cfg` must be NULL or a pointer from `msfeat_config_default` or
// `msfeat_config_load` that has not been freed yet.
void msfeat_config_free(struct msfeat_config *cfg);

// Counts effective (non-blank, non-comment) lines of a source file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum msfeat_status msfeat_count_effective_lines(const char *path, uint64_t *out);

// Analyzes a checked-out repository tree and returns one record per
// discovered microservice.
//
// `cfg` may be NULL to use defaults. `include_tests` also scans sources
// under `src/test`. On success `*out` owns the records; free with
// `msfeat_records_free`.
//
// # Safety
// `root`, `system`, and `release` must be NUL-terminated strings; `out`
// must be a valid pointer; `cfg` must be NULL or a live config handle.
enum msfeat_status msfeat_analyze_tree(const char *root,
                                       const char *system,
                                       const char *release,
                                       const struct msfeat_config *cfg,
                                       bool include_tests,
                                       struct msfeat_records **out);

// Number of records in the set. NULL yields 0.
//
// # Safety
// `records` must be NULL or a live records handle.
size_t msfeat_records_len(const struct msfeat_records *records);

// Renders the records as the CSV dataset (header plus one row each).
//
// # Safety
// `records` must be a live records handle and `out` a valid pointer.
enum msfeat_status msfeat_records_to_csv(const struct msfeat_records *records, char **out);

// Renders the records as JSON lines, one object per record.
//
// # Safety
// `records` must be a live records handle and `out` a valid pointer.
enum msfeat_status msfeat_records_to_jsonl(const struct msfeat_records *records, char **out);

// Releases a records handle. NULL is a no-op.
//
// # Safety
// `records` must be NULL or a pointer from `msfeat_analyze_tree` that has
// not been freed yet.
void msfeat_records_free(struct msfeat_records *records);

// Releases a string returned through an out pointer. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string produced by this library that has not been
// freed yet.
void msfeat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSFEAT_H */
