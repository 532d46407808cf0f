/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef EPL_H
#define EPL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EplStatus {
  EPL_STATUS_OK = 0,
  EPL_STATUS_NULL_POINTER = 1,
  EPL_STATUS_INVALID_UTF8 = 2,
  EPL_STATUS_SYNTAX = 3,
  EPL_STATUS_MODEL = 4,
  /**
   * An announcement or action precondition is false at the point.
   */
  EPL_STATUS_PRECONDITION = 5,
  EPL_STATUS_UNSUPPORTED = 6,
  EPL_STATUS_INVALID_ARGUMENT = 7,
  EPL_STATUS_IO = 8,
  EPL_STATUS_PANIC = 9,
} EplStatus;

typedef enum EplFrameClass {
  EPL_FRAME_CLASS_K = 0,
  EPL_FRAME_CLASS_K45 = 1,
  EPL_FRAME_CLASS_KD45 = 2,
  EPL_FRAME_CLASS_S5 = 3,
} EplFrameClass;

/**
 * Opaque formula.
 */
typedef struct EplFormula EplFormula;

/**
 * Opaque pointed Kripke model.
 */
typedef struct EplModel EplModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call into this library on the same thread.
 */
const char *epl_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library or be null.
 */
void epl_string_free(char *s);

/**
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum EplStatus epl_formula_parse(const char *src, struct EplFormula **out);

/**
 * Canonical text of a formula; free it with [`epl_string_free`].
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_formula_print(const struct EplFormula *f, char **out);

/**
 * # Safety
 * `f` must come from this library or be null; it is invalid afterwards.
 */
void epl_formula_free(struct EplFormula *f);

/**
 * Reads a model in the JSON file format; the `point` field is required.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EplStatus epl_model_from_json(const char *json, struct EplModel **out);

/**
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_model_to_json(const struct EplModel *m, char **out);

/**
 * Number of states of the model.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_model_state_count(const struct EplModel *m, size_t *out);

/**
 * # Safety
 * `m` must come from this library or be null; it is invalid afterwards.
 */
void epl_model_free(struct EplModel *m);

/**
 * Truth of `f` at the point of `m`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum EplStatus epl_eval(const struct EplModel *m, const struct EplFormula *f, bool *out);

/**
 * Believed announcement of `f` (arrow elimination) as a new model.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum EplStatus epl_believed_update(const struct EplModel *m,
                                   const struct EplFormula *f,
                                   struct EplModel **out);

/**
 * Truthful announcement of `f` (state elimination); fails with
 * `EPL_STATUS_PRECONDITION` when `f` is false at the point.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum EplStatus epl_truthful_update(const struct EplModel *m,
                                   const struct EplFormula *f,
                                   struct EplModel **out);

/**
 * Graphviz text; `simplified` draws K45 clusters compactly.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_model_to_dot(const struct EplModel *m, bool simplified, char **out);

/**
 * Validity (`valid` true) or satisfiability of a single-agent formula over
 * K45 or KD45.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_decide(const struct EplFormula *f,
                          enum EplFrameClass class_,
                          bool valid,
                          bool *out);

/**
 * Validity of the check formula for the bit string `sigma`.
 *
 * # Safety
 * `f` must be a live handle, `sigma` a NUL-terminated string, `out` writable.
 */
enum EplStatus epl_sigma_valid(const struct EplFormula *f,
                               const char *sigma,
                               enum EplFrameClass class_,
                               bool believable,
                               bool *out);

/**
 * Whether `f` is a believable true lie on KD45, by the lying-form search
 * (`syntactic`) or by model enumeration.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum EplStatus epl_is_believable_true_lie(const struct EplFormula *f, bool syntactic, bool *out);

/**
 * Builds and verifies a bundled scenario and returns the report as JSON.
 * `params_json` is null or a JSON object of string values.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `params_json` one or null, and
 * `out` writable.
 */
enum EplStatus epl_scenario_run_json(const char *name, const char *params_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPL_H */
