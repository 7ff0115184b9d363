#ifndef FANO_LINES_H
#define FANO_LINES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlKind {
  FL_KIND_NODAL = 0,
  FL_KIND_CUSPIDAL_CYCLIC = 1,
} FlKind;

/**
 * Status codes returned by every function.
 */
typedef enum FlStatus {
  FL_STATUS_OK = 0,
  FL_STATUS_NULL_POINTER = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  FL_STATUS_PARSE_ERROR = 3,
  FL_STATUS_INVALID_ARGUMENT = 4,
  FL_STATUS_COMPUTATION_ERROR = 5,
  /**
   * The report was produced and contains failing checks.
   */
  FL_STATUS_CHECKS_FAILED = 6,
  FL_STATUS_PANIC = 7,
} FlStatus;

/**
 * Opaque fixture handle.
 */
typedef struct FlFixture FlFixture;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fl_last_error(void);

/**
 * Library version, static storage.
 */
const char *fl_version(void);

/**
 * Parses a fixture from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlStatus fl_fixture_from_json(const char *json, struct FlFixture **out);

/**
 * Reads and parses a fixture file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlStatus fl_fixture_load(const char *path, struct FlFixture **out);

/**
 * Releases a fixture handle. Null is ignored.
 *
 * # Safety
 * `fixture` must come from this library and not be used afterwards.
 */
void fl_fixture_free(struct FlFixture *fixture);

/**
 * # Safety
 * `fixture` must be a live handle and `out` a valid pointer.
 */
enum FlStatus fl_fixture_kind(const struct FlFixture *fixture, enum FlKind *out);

/**
 * Number of surface points stored in the fixture.
 *
 * # Safety
 * `fixture` must be a live handle and `out` a valid pointer.
 */
enum FlStatus fl_fixture_point_count(const struct FlFixture *fixture, size_t *out);

/**
 * The fixture serialized back to its canonical JSON form.
 *
 * # Safety
 * `fixture` must be a live handle and `out` a valid pointer.
 */
enum FlStatus fl_fixture_to_json(const struct FlFixture *fixture, char **out);

/**
 * Runs a suite (`validate`, `phi`, `local`, `divisors`, `symmetry`, `all`)
 * with sample field `q`, `q_sqrt_d` or `q_zeta3` (null means `q`). The JSON
 * report is written to `out` both for `Ok` and for `ChecksFailed`.
 *
 * # Safety
 * String arguments must be NUL-terminated (or null where allowed), the
 * handle live and `out` a valid pointer.
 */
enum FlStatus fl_run_suite(const struct FlFixture *fixture,
                           const char *suite_name,
                           uint64_t seed,
                           size_t samples,
                           const char *field,
                           char **out);

/**
 * `phi` of a scheme given as JSON, e.g.
 * `{"variant":"reduced","points":[[...],[...]]}`.
 *
 * # Safety
 * As for [`fl_run_suite`].
 */
enum FlStatus fl_phi(const struct FlFixture *fixture, const char *scheme_json, char **out);

/**
 * `phi_inverse` of a line given as JSON `[[six coordinates], [six coordinates]]`.
 *
 * # Safety
 * As for [`fl_run_suite`].
 */
enum FlStatus fl_phi_inverse(const struct FlFixture *fixture, const char *line_json, char **out);

/**
 * Transversal singularity type at the fixture point `index`.
 *
 * # Safety
 * As for [`fl_run_suite`].
 */
enum FlStatus fl_transversal_type(const struct FlFixture *fixture, size_t index, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FANO_LINES_H */
