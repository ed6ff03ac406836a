#ifndef GRADEDLIE_H
#define GRADEDLIE_H

/* Generated by cbindgen from gradedlie-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every C API call.
typedef enum GlStatus {
  // Call succeeded and all mathematical checks passed.
  GL_STATUS_OK = 0,
  // Call ran but a mathematical check failed.
  GL_STATUS_CHECK_FAILED = 1,
  // Invalid parameters or unparseable input.
  GL_STATUS_INVALID_INPUT = 2,
  // A required pointer was null.
  GL_STATUS_NULL_POINTER = 3,
  // Internal panic; should not happen.
  GL_STATUS_INTERNAL = 4,
} GlStatus;

// Opaque validated parameter pair (lambda, mu).
typedef struct GlParams GlParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Validates (lambda, mu), both exact rational strings like "-2" or "1/3".
// On success writes an owned handle to `out`; free with `gl_params_free`.
//
// # Safety
// `lambda` and `mu` must be valid NUL-terminated strings; `out` must be a
// valid pointer.
enum GlStatus gl_params_new(const char *lambda, const char *mu, struct GlParams **out);

// Releases a handle from `gl_params_new`. Null is a no-op.
//
// # Safety
// `p` must be null or a pointer previously returned by `gl_params_new`.
void gl_params_free(struct GlParams *p);

// Writes the classification case name ("generic_mu", ...) to `out_name`.
//
// # Safety
// `p` must be a live handle; `out_name` a valid pointer.
enum GlStatus gl_params_case(const struct GlParams *p, char **out_name);

// Exhaustive Jacobi verification on the window; JSON report to `out_json`.
//
// # Safety
// `p` must be a live handle; `out_json` a valid pointer.
enum GlStatus gl_jacobi_check(const struct GlParams *p, int64_t window, char **out_json);

// Degree-0 classification report as JSON; `Ok` iff it matches the theorems.
//
// # Safety
// `p` must be a live handle; `out_json` a valid pointer.
enum GlStatus gl_classify(const struct GlParams *p, int64_t window, char **out_json);

// Grid classification report. `grid_text` uses the CLI grid file format
// (one `lambda mu` pair per line); pass null for the default grid.
//
// # Safety
// `out_json` must be a valid pointer; `grid_text` null or NUL-terminated.
enum GlStatus gl_report(const char *grid_text, int64_t window, uint64_t seed, char **out_json);

// Verifies an automorphism spec (CLI spec syntax: constructor lines or an
// `images` table). JSON report to `out_json`.
//
// # Safety
// `p` must be a live handle; `spec` NUL-terminated; `out_json` valid.
enum GlStatus gl_aut_verify(const struct GlParams *p,
                            int64_t window,
                            const char *spec,
                            uint64_t seed,
                            char **out_json);

// Factors an automorphism spec through the classified families; JSON
// factorization data to `out_json`.
//
// # Safety
// `p` must be a live handle; `spec` NUL-terminated; `out_json` valid.
enum GlStatus gl_aut_factor(const struct GlParams *p,
                            int64_t window,
                            const char *spec,
                            char **out_json);

// Releases a string produced by this library. Null is a no-op.
//
// # Safety
// `s` must be null or a pointer previously written by this library.
void gl_string_free(char *s);

// Library version as a static string; do not free.
const char *gl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRADEDLIE_H */
