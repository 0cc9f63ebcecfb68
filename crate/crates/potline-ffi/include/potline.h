#ifndef POTLINE_H
#define POTLINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  POTLINE_STATUS_OK = 0,
  POTLINE_STATUS_NULL_ARGUMENT = 1,
  POTLINE_STATUS_INVALID_UTF8 = 2,
  POTLINE_STATUS_PARSE = 3,
  POTLINE_STATUS_ARITH = 4,
  POTLINE_STATUS_VARIANT_MISMATCH = 5,
  POTLINE_STATUS_OFF_GRID = 6,
  POTLINE_STATUS_DIMENSION = 7,
  POTLINE_STATUS_EXHAUSTED = 8,
  POTLINE_STATUS_BUDGET_EXCEEDED = 9,
  POTLINE_STATUS_BAD_CHAIN = 10,
  POTLINE_STATUS_TRIVIAL_INSTANCE = 11,
  POTLINE_STATUS_UNMAPPABLE_CERT = 12,
  POTLINE_STATUS_NO_KAPPA = 13,
  POTLINE_STATUS_IO = 14,
  POTLINE_STATUS_REJECTED = 15,
  POTLINE_STATUS_PANIC = 16,
} PotlineStatus;

/**
 * Opaque composition of reductions.
 */
typedef struct PotlineChain PotlineChain;

/**
 * Opaque problem instance.
 */
typedef struct PotlineInstance PotlineInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Owned by the library.
 */
const char *potline_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void potline_string_free(char *s);

/**
 * Parses instance JSON. `problem` is `plcp`, `uso`, `contraction`, `opdc`, `line` or a line flavor.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
PotlineStatus potline_instance_from_json(const char *problem,
                                         const char *json,
                                         PotlineInstance **out_instance);

/**
 * Releases an instance handle.
 *
 * # Safety
 * `inst` must come from this library and not have been freed.
 */
void potline_instance_free(PotlineInstance *inst);

/**
 * Writes a seeded instance as JSON. `kind` is e.g. `p-matrix-lcp` or `explicit-line`.
 *
 * # Safety
 * `kind` must be NUL-terminated; out-pointers must be writable. `out_problem` may be null.
 */
PotlineStatus potline_generate(const char *kind,
                               size_t size,
                               uint64_t seed,
                               bool broken,
                               char **out_problem,
                               char **out_json);

/**
 * Runs `algo` (`lemke`, `brute`, `follow`, `aldous`, `find_fp`, `approx`, or null for the default)
 * and writes the verified certificate as JSON.
 *
 * # Safety
 * `inst` must be a live handle; `algo` null or NUL-terminated; `out_cert` writable.
 */
PotlineStatus potline_solve(PotlineInstance *inst,
                            const char *algo,
                            uint64_t seed,
                            char **out_cert);

/**
 * Checks a certificate. Returns `Ok` on acceptance and `Rejected` with the failed clause otherwise.
 *
 * # Safety
 * `inst` must be a live handle and `cert_json` NUL-terminated.
 */
PotlineStatus potline_verify(const PotlineInstance *inst, const char *cert_json);

/**
 * One oracle call, e.g. `"S 0101"`, `"V 0000"` or `"D 1 11"`.
 *
 * # Safety
 * `inst` must be a live handle, `q` NUL-terminated and `out_answer` writable.
 */
PotlineStatus potline_query(const PotlineInstance *inst, const char *q, char **out_answer);

/**
 * Applies the reductions of `chain` (e.g. `plcp:uso:opdc`) to a copy of `src`.
 * On `TrivialInstance` the last error holds the source certificate as JSON.
 *
 * # Safety
 * `src` must be a live handle, `chain` NUL-terminated and `out_chain` writable.
 */
PotlineStatus potline_chain_build(const PotlineInstance *src,
                                  const char *chain,
                                  PotlineChain **out_chain);

/**
 * New instance handle for the last instance of the chain.
 *
 * # Safety
 * `chain` must be a live handle and `out_instance` writable.
 */
PotlineStatus potline_chain_target(const PotlineChain *chain, PotlineInstance **out_instance);

/**
 * Maps a certificate of the chain target back to the chain source.
 *
 * # Safety
 * `chain` must be a live handle, `cert_json` NUL-terminated and `out_cert` writable.
 */
PotlineStatus potline_chain_map_back(const PotlineChain *chain,
                                     const char *cert_json,
                                     char **out_cert);

/**
 * Releases a chain handle.
 *
 * # Safety
 * `chain` must come from this library and not have been freed.
 */
void potline_chain_free(PotlineChain *chain);

/**
 * Static name of a status code.
 */
const char *potline_status_name(PotlineStatus s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POTLINE_H */
