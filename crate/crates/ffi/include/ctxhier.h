#ifndef CTXHIER_H
#define CTXHIER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum CtxStatus {
  CTX_STATUS_OK = 0,
  CTX_STATUS_NULL_ARGUMENT = 1,
  CTX_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed document or unknown name.
   */
  CTX_STATUS_SCHEMA = 3,
  /**
   * The input is well formed but fails a check (for example no-signaling).
   */
  CTX_STATUS_VALIDATION = 4,
  CTX_STATUS_CAP_EXCEEDED = 5,
  /**
   * The requested object does not exist, such as a witness for a tier the
   * model does not reach.
   */
  CTX_STATUS_NOT_APPLICABLE = 6,
  CTX_STATUS_INTERNAL = 7,
  CTX_STATUS_PANIC = 8,
} CtxStatus;

/**
 * An empirical model.
 */
typedef struct CtxModel CtxModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ctxhier_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ctxhier_string_free(char *s);

/**
 * Frees a model handle. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and not have been freed.
 */
void ctxhier_model_free(struct CtxModel *m);

/**
 * Loads a built-in model by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CtxStatus ctxhier_model_from_catalog(const char *name, struct CtxModel **out);

/**
 * Parses a model document, or a quantum experiment document converted with
 * the default snapping settings.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CtxStatus ctxhier_model_from_json(const char *json, struct CtxModel **out);

/**
 * The model as a model document.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CtxStatus ctxhier_model_to_json(const struct CtxModel *m, char **out);

/**
 * Tier verdict with the representation-side and betting-side rows, as JSON.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CtxStatus ctxhier_classify(const struct CtxModel *m, char **out);

/**
 * Witness report for `tier` (`strong`, `logical` or `probabilistic`).
 *
 * # Safety
 * `m` must be a live handle, `tier` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum CtxStatus ctxhier_witness(const struct CtxModel *m, const char *tier, char **out);

/**
 * Dutch Book certificate document, or `null` when none exists.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CtxStatus ctxhier_dutch_book(const struct CtxModel *m, char **out);

/**
 * Re-checks any document. `valid` receives the outcome of the check; a
 * malformed document is reported through the status instead.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `valid` a valid pointer.
 */
enum CtxStatus ctxhier_verify(const char *json, bool *valid);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTXHIER_H */
