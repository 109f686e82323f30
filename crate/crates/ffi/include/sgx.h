#ifndef SGX_FFI_H
#define SGX_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SgxStatus {
  SGX_STATUS_OK = 0,
  SGX_STATUS_NULL_POINTER = 1,
  SGX_STATUS_INVALID_UTF8 = 2,
  SGX_STATUS_PARSE = 3,
  SGX_STATUS_NOT_ASSOCIATIVE = 4,
  SGX_STATUS_OUT_OF_RANGE = 5,
  SGX_STATUS_NOT_AN_IDEAL = 6,
  SGX_STATUS_NOT_COMMUTATIVE = 7,
  SGX_STATUS_UNKNOWN_FAMILY = 8,
  SGX_STATUS_DOMAIN = 9,
  SGX_STATUS_PANIC = 10,
} SgxStatus;

typedef enum SgxClaim {
  SGX_CLAIM_C_CLOSED = 0,
  SGX_CLAIM_IDEALLY_CLOSED = 1,
  SGX_CLAIM_PROJECTIVELY_CLOSED = 2,
  SGX_CLAIM_CENTER_NECESSARY = 3,
} SgxClaim;

/**
 * Outcome of a decision procedure.
 */
typedef enum SgxVerdict {
  SGX_VERDICT_HOLDS = 0,
  SGX_VERDICT_FAILS = 1,
  SGX_VERDICT_UNKNOWN = 2,
} SgxVerdict;

/**
 * Opaque handle to a validated finite semigroup.
 */
typedef struct SgxSemigroup SgxSemigroup;

/**
 * Parses a semigroup from the JSON (`{"names":[..],"table":[[..]]}`) or
 * plain-text table format and validates it.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SgxStatus sgx_semigroup_from_json(const char *text, struct SgxSemigroup **out);

/**
 * Builds a semigroup from a row-major `order * order` table with entries in
 * `0..order`. Elements are named `0`, `1`, ...
 *
 * # Safety
 * `entries` must point to `order * order` readable values and `out` must be
 * a valid pointer.
 */
enum SgxStatus sgx_semigroup_from_table(size_t order,
                                        const size_t *entries,
                                        struct SgxSemigroup **out);

/**
 * Releases a handle. Null is accepted.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sgx_semigroup_free(struct SgxSemigroup *s);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t sgx_semigroup_order(const struct SgxSemigroup *s);

/**
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum SgxStatus sgx_semigroup_product(const struct SgxSemigroup *s, size_t x, size_t y, size_t *out);

/**
 * Structure report (idempotents, order, H-classes, centers, ...) as JSON.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer. The string is
 * released with `sgx_string_free`.
 */
enum SgxStatus sgx_semigroup_analyze_json(const struct SgxSemigroup *s, char **out);

/**
 * Rees quotient by the ideal given as element indices. When `map` is not
 * null it receives the image of every element, so it needs room for
 * `sgx_semigroup_order(s)` values.
 *
 * # Safety
 * `ideal` must point to `len` values (it may be null when `len` is 0) and
 * `out` must be a valid pointer.
 */
enum SgxStatus sgx_semigroup_rees_quotient(const struct SgxSemigroup *s,
                                           const size_t *ideal,
                                           size_t len,
                                           struct SgxSemigroup **out,
                                           size_t *map);

/**
 * Runs a decision procedure on a finite semigroup. `report_json` may be
 * null; otherwise it receives the full report.
 *
 * # Safety
 * `s` must be a live handle, `verdict` a valid pointer and `report_json`
 * null or valid.
 */
enum SgxStatus sgx_decide(const struct SgxSemigroup *s,
                          enum SgxClaim claim,
                          uint64_t budget,
                          enum SgxVerdict *verdict,
                          char **report_json);

/**
 * Same as `sgx_decide` for a named family such as `quasicyclic:3`.
 *
 * # Safety
 * `family` must be a NUL-terminated string, `verdict` a valid pointer and
 * `report_json` null or valid.
 */
enum SgxStatus sgx_decide_family(const char *family,
                                 enum SgxClaim claim,
                                 uint64_t budget,
                                 enum SgxVerdict *verdict,
                                 char **report_json);

/**
 * Number of semigroups of the given order up to isomorphism, or up to
 * isomorphism and anti-isomorphism when `iso_anti` is set. Order 5 needs
 * `allow_order_5`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SgxStatus sgx_enumerate_count(size_t order, bool iso_anti, bool allow_order_5, size_t *out);

/**
 * Message for the most recent failing call on this thread, or an empty
 * string. Valid until the next library call on the same thread.
 */
const char *sgx_last_error(void);

/**
 * Releases a string returned by the library. Null is accepted.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sgx_string_free(char *s);

#endif  /* SGX_FFI_H */
