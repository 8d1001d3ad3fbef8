#ifndef TROPMULT_H
#define TROPMULT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Multiplicity methods exposed over the ABI.
 */
typedef enum TropmultMethod {
  TropmultMethod_Det = 0,
  TropmultMethod_Trqft = 1,
  TropmultMethod_TrqftTree = 2,
  TropmultMethod_BoxSubalgebra = 3,
  TropmultMethod_Bracket = 4,
  TropmultMethod_Split = 5,
} TropmultMethod;

/**
 * Status codes mirroring the CLI exit codes.
 */
typedef enum TropmultStatus {
  TropmultStatus_Ok = 0,
  TropmultStatus_ParseError = 1,
  TropmultStatus_PreconditionError = 2,
  TropmultStatus_InvariantError = 3,
  /**
   * Null pointer or invalid UTF-8 handed across the boundary.
   */
  TropmultStatus_UsageError = 4,
} TropmultStatus;

/**
 * Opaque curve handle: a parsed document plus its decoded instance.
 */
typedef struct TropmultCurve TropmultCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; valid until the next failing call.
 */
const char *tropmult_last_error(void);

/**
 * Parse a JSON curve document. On success writes a handle through `out`;
 * the caller frees it with `tropmult_curve_free`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TropmultStatus tropmult_curve_load_json(const char *json, struct TropmultCurve **out);

/**
 * Free a handle returned by `tropmult_curve_load_json`.
 *
 * # Safety
 * `handle` must come from `tropmult_curve_load_json` and not be used after.
 */
void tropmult_curve_free(struct TropmultCurve *handle);

/**
 * Structural validation; 0 when every invariant holds. Diagnostics go to
 * the error message.
 *
 * # Safety
 * `handle` must be a live handle.
 */
enum TropmultStatus tropmult_curve_validate(const struct TropmultCurve *handle);

/**
 * Genus of the curve, or −1 on a null handle.
 *
 * # Safety
 * `handle` must be a live handle.
 */
int tropmult_curve_genus(const struct TropmultCurve *handle);

/**
 * Compute the multiplicity with the given method and write it through
 * `out` as a NUL-terminated decimal string (caller frees it with
 * `tropmult_string_free`). `sink_or_edge` selects the sink vertex for the
 * tree/bracket methods or the split edge; pass −1 for the defaults.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum TropmultStatus tropmult_mult(const struct TropmultCurve *handle,
                                  enum TropmultMethod method,
                                  int64_t sink_or_edge,
                                  char **out);

/**
 * Canonical JSON serialization of a handle's document; caller frees the
 * string.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum TropmultStatus tropmult_curve_to_json(const struct TropmultCurve *handle, char **out);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be used after.
 */
void tropmult_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TROPMULT_H */
