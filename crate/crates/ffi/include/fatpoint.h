#ifndef FATPOINT_H
#define FATPOINT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum FatpointStatus {
  FATPOINT_STATUS_OK = 0,
  FATPOINT_STATUS_NULL_POINTER = 1,
  FATPOINT_STATUS_PARSE = 2,
  FATPOINT_STATUS_MATH = 3,
  FATPOINT_STATUS_PRECISION = 4,
  FATPOINT_STATUS_REPLAY_FAILED = 5,
  FATPOINT_STATUS_PANIC = 6,
} FatpointStatus;

/**
 * A validated-or-not triangular cycle.
 */
typedef struct FatpointCycle FatpointCycle;

/**
 * A reduction trace together with the cycle it reduces.
 */
typedef struct FatpointTrace FatpointTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a cycle document. `default_precision` applies when the document
 * has no `precision` field; pass 0 for the `2m + 4` default with `m = 4`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FatpointStatus fatpoint_cycle_parse(const char *json,
                                         size_t default_precision,
                                         struct FatpointCycle **out);

/**
 * # Safety
 * `cycle` must come from [`fatpoint_cycle_parse`] and not be used afterwards.
 */
void fatpoint_cycle_free(struct FatpointCycle *cycle);

/**
 * Checks admissibility; the diagnostic is left in the last error message.
 *
 * # Safety
 * `cycle` must be a live handle.
 */
enum FatpointStatus fatpoint_cycle_validate(const struct FatpointCycle *cycle);

/**
 * Writes up to `capacity` degrees into `degrees` and the number of levels
 * into `len`. Passing a null `degrees` with `capacity` 0 only reports `len`.
 *
 * # Safety
 * `degrees` must hold `capacity` entries; `len` must be valid.
 */
enum FatpointStatus fatpoint_cycle_degree_vector(const struct FatpointCycle *cycle,
                                                 uint32_t *degrees,
                                                 size_t capacity,
                                                 size_t *len);

/**
 * Serializes the cycle as a cycle document.
 *
 * # Safety
 * `cycle` must be a live handle and `out` a valid pointer.
 */
enum FatpointStatus fatpoint_cycle_to_json(const struct FatpointCycle *cycle, char **out);

/**
 * Computes the regulator modulo `t^m`. The symbol document is written to
 * `symbol_json`; if `trace` is non-null it receives a new trace handle.
 *
 * # Safety
 * `cycle` must be a live handle; `symbol_json` must be valid.
 */
enum FatpointStatus fatpoint_regulator(const struct FatpointCycle *cycle,
                                       size_t m,
                                       char **symbol_json,
                                       struct FatpointTrace **trace);

/**
 * Replays every certificate; returns `ReplayFailed` with the reason in the
 * last error message when one is rejected.
 *
 * # Safety
 * `trace` must be a live handle.
 */
enum FatpointStatus fatpoint_trace_replay(const struct FatpointTrace *trace);

/**
 * # Safety
 * `trace` must be a live handle and `out` a valid pointer.
 */
enum FatpointStatus fatpoint_trace_to_json(const struct FatpointTrace *trace, char **out);

/**
 * Loads a trace document, for instance one written by `fatpoint reduce --emit-trace`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FatpointStatus fatpoint_trace_from_json(const char *json, struct FatpointTrace **out);

/**
 * # Safety
 * `trace` must come from this library and not be used afterwards.
 */
void fatpoint_trace_free(struct FatpointTrace *trace);

/**
 * Decides whether two cycles agree modulo `t^m`.
 *
 * # Safety
 * Both handles must be live and `equivalent` valid.
 */
enum FatpointStatus fatpoint_cycles_equivalent(const struct FatpointCycle *a,
                                               const struct FatpointCycle *b,
                                               size_t m,
                                               bool *equivalent);

/**
 * Witt vector arithmetic on series literals of length `m`.
 *
 * `op` is one of `add`, `mul`, `coords`, `ghost`; `field` is `Q` or `F<p>`.
 * `y` is ignored (and may be null) for the unary operations. The result is
 * a JSON object with `result` and `coordinates`, or `ghost`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid.
 */
enum FatpointStatus fatpoint_witt(const char *op,
                                  const char *field,
                                  size_t m,
                                  const char *x,
                                  const char *y,
                                  char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fatpoint_string_free(char *s);

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next library call on this thread.
 */
const char *fatpoint_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *fatpoint_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FATPOINT_H */
