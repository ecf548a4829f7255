#ifndef CALISSON_H
#define CALISSON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CALISSON_ALGO_BF 0

#define CALISSON_ALGO_ADVANCING 1

#define CALISSON_ALGO_THURSTON 2

#define CALISSON_ALGO_INFINITE 3

/**
 * Result codes. `Ok` and `Infeasible` are both successful solves.
 */
typedef enum {
  CALISSON_STATUS_OK = 0,
  CALISSON_STATUS_INFEASIBLE = 1,
  CALISSON_STATUS_NULL_POINTER = 2,
  CALISSON_STATUS_INVALID_UTF8 = 3,
  CALISSON_STATUS_PARSE_ERROR = 4,
  CALISSON_STATUS_INVALID_INSTANCE = 5,
  CALISSON_STATUS_UNSUPPORTED = 6,
  CALISSON_STATUS_INTERNAL = 7,
} CalissonStatus;

/**
 * A validated tiling instance.
 */
typedef struct CalissonInstance CalissonInstance;

/**
 * The result of a solve: a tiling or an infeasibility certificate.
 */
typedef struct CalissonOutcome CalissonOutcome;

/**
 * Message describing the last failure on this thread, or NULL. Valid until
 * the next call into the library from the same thread.
 */
const char *calisson_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *calisson_version(void);

/**
 * Parse and validate an instance from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
CalissonStatus calisson_instance_from_json(const char *json, CalissonInstance **out);

/**
 * # Safety
 * `instance` must come from [`calisson_instance_from_json`] or be NULL.
 */
void calisson_instance_free(CalissonInstance *instance);

/**
 * Number of unit triangles of a bounded instance, 0 for the infinite grid.
 *
 * # Safety
 * `instance` must be a live handle or NULL.
 */
size_t calisson_instance_triangle_count(const CalissonInstance *instance);

/**
 * Solve with one of the `CALISSON_ALGO_*` algorithms. On `Ok` or
 * `Infeasible`, `*out` holds a new outcome handle.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
CalissonStatus calisson_solve(const CalissonInstance *instance,
                              uint32_t algorithm,
                              CalissonOutcome **out);

/**
 * Solve the infinite grid and extract the tiling on the window of the given
 * radius around `(x, y, z)`.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
CalissonStatus calisson_solve_window(const CalissonInstance *instance,
                                     int64_t x,
                                     int64_t y,
                                     int64_t z,
                                     uint32_t radius,
                                     CalissonOutcome **out);

/**
 * # Safety
 * `outcome` must come from a solve call or be NULL.
 */
void calisson_outcome_free(CalissonOutcome *outcome);

/**
 * 1 if the outcome holds a tiling, 0 otherwise (including NULL).
 *
 * # Safety
 * `outcome` must be a live handle or NULL.
 */
int32_t calisson_outcome_is_tiled(const CalissonOutcome *outcome);

/**
 * Number of lozenges in the tiling, 0 if infeasible.
 *
 * # Safety
 * `outcome` must be a live handle or NULL.
 */
size_t calisson_outcome_lozenge_count(const CalissonOutcome *outcome);

/**
 * Total weight of the negative cycle, 0 if the outcome is tiled.
 *
 * # Safety
 * `outcome` must be a live handle or NULL.
 */
int64_t calisson_outcome_cycle_weight(const CalissonOutcome *outcome);

/**
 * The outcome as JSON. Free with [`calisson_string_free`]; NULL on error.
 *
 * # Safety
 * `outcome` must be a live handle.
 */
char *calisson_outcome_to_json(const CalissonOutcome *outcome);

/**
 * Re-check a tiled outcome with the independent validator: `Ok` if valid,
 * `Infeasible` if it breaks a rule or holds no tiling.
 *
 * # Safety
 * Both handles must be live.
 */
CalissonStatus calisson_outcome_check(const CalissonInstance *instance,
                                      const CalissonOutcome *outcome);

/**
 * SVG drawing of the instance with the outcome (which may be NULL), using
 * the default layers. Free with [`calisson_string_free`]; NULL on error.
 *
 * # Safety
 * `instance` must be live; `outcome` live or NULL.
 */
char *calisson_render_svg(const CalissonInstance *instance, const CalissonOutcome *outcome);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void calisson_string_free(char *s);

#endif  /* CALISSON_H */
