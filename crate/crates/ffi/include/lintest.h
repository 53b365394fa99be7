#ifndef LINTEST_H
#define LINTEST_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum LtStatus {
  LT_STATUS_OK = 0,
  LT_STATUS_NULL_POINTER = 1,
  LT_STATUS_INVALID_ARGUMENT = 2,
  LT_STATUS_INVALID_BUDGET = 3,
  LT_STATUS_DIMENSION_MISMATCH = 4,
  LT_STATUS_DOMAIN_TOO_LARGE = 5,
  LT_STATUS_UNREALIZABLE_FRACTION = 6,
  LT_STATUS_INVALID_FAULT = 7,
  LT_STATUS_ORACLE_ERROR = 8,
  LT_STATUS_PANIC = 9,
} LtStatus;

typedef enum LtOutcome {
  LT_OUTCOME_PASS = 0,
  LT_OUTCOME_FAIL = 1,
} LtOutcome;

typedef enum LtFailureSite {
  LT_FAILURE_SITE_NONE = 0,
  LT_FAILURE_SITE_PAIRING_LOOP = 1,
  LT_FAILURE_SITE_SPLIT_LOOP = 2,
  LT_FAILURE_SITE_DIVISIBILITY_CHECK = 3,
  LT_FAILURE_SITE_FINAL_SPLIT = 4,
} LtFailureSite;

/**
 * A program under test.
 */
typedef struct LtOracle LtOracle;

/**
 * Evaluates the program at the `m` coordinates in `x`, writing the answer
 * to `out`. Returns 0 on success; any other value aborts the test with
 * `LT_STATUS_ORACLE_ERROR`.
 */
typedef int32_t (*LtEvalFn)(void *ctx, const uint64_t *x, size_t m, int64_t *out);

/**
 * Summary of one tester run.
 */
typedef struct LtVerdict {
  enum LtOutcome outcome;
  enum LtFailureSite failure_site;
  uint64_t queries_used;
} LtVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Wraps a C callback on `D_nᵐ`, `1 ≤ n ≤ 63`. With `extension` the oracle
 * also answers the scalar point `2ⁿ`, which the property tester needs.
 *
 * # Safety
 * `f` must be safe to call with `ctx` until the oracle is freed.
 */
enum LtStatus lt_oracle_from_callback(uint32_t n,
                                      size_t m,
                                      LtEvalFn f,
                                      void *ctx,
                                      bool extension,
                                      struct LtOracle **out);

/**
 * A built-in faulty program deviating from `x ↦ Σ bᵢxᵢ` as described by
 * `fault` in the compact `kind[:fraction[:magnitude]]` form. Seeded sites
 * use `fault_seed`.
 *
 * # Safety
 * `b` must point to `m` values and `fault` to a NUL-terminated string.
 */
enum LtStatus lt_oracle_from_fault(uint32_t n,
                                   size_t m,
                                   const int64_t *b,
                                   const char *fault,
                                   uint64_t fault_seed,
                                   struct LtOracle **out);

/**
 * # Safety
 * `oracle` must come from this library and not be used afterwards.
 */
void lt_oracle_free(struct LtOracle *oracle);

/**
 * Total queries answered so far.
 *
 * # Safety
 * `oracle` must be null or valid.
 */
uint64_t lt_oracle_query_count(const struct LtOracle *oracle);

/**
 * Self-tests a scalar program against `x ↦ b·x`. `epsilon` may be null
 * (1/8); `k1 = k2 = 0` derives the loop counts from it.
 *
 * # Safety
 * Pointers must be valid; `epsilon` may be null.
 */
enum LtStatus lt_self_test(const struct LtOracle *oracle,
                           int64_t b,
                           const char *epsilon,
                           uint64_t k1,
                           uint64_t k2,
                           uint64_t seed,
                           struct LtVerdict *out);

/**
 * Tests a scalar program for linearity. On PASS `*learned_b` receives the
 * coefficient as a decimal string (free it with `lt_string_free`); on FAIL
 * it is set to null. The oracle needs the extension point.
 *
 * # Safety
 * Pointers must be valid; `epsilon` may be null.
 */
enum LtStatus lt_general_linear_test(const struct LtOracle *oracle,
                                     const char *epsilon,
                                     uint64_t k1,
                                     uint64_t k2,
                                     uint64_t seed,
                                     struct LtVerdict *out,
                                     char **learned_b);

/**
 * Self-tests a program on `m`-vectors against `x ↦ Σ bᵢxᵢ`.
 *
 * # Safety
 * `b` must point to `m` values; other pointers must be valid.
 */
enum LtStatus lt_hom_self_test(const struct LtOracle *oracle,
                               const int64_t *b,
                               size_t m,
                               const char *epsilon,
                               uint64_t k1,
                               uint64_t k2,
                               uint64_t seed,
                               struct LtVerdict *out);

/**
 * Checks the program's answer at input `a` against `x ↦ b·x`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum LtStatus lt_check_input(const struct LtOracle *oracle,
                             int64_t b,
                             uint64_t a,
                             uint64_t seed,
                             struct LtVerdict *out);

/**
 * Derives the loop counts for closeness `epsilon`. Rationals are strings
 * such as "1/8"; null `beta`, `alpha` and `target` mean `ε/4`, `2/3` and
 * `7/8`.
 *
 * # Safety
 * String arguments must be null or NUL-terminated.
 */
enum LtStatus lt_budget_for(const char *epsilon,
                            const char *beta,
                            const char *alpha,
                            const char *target,
                            uint64_t *k1,
                            uint64_t *k2);

/**
 * Smallest trial count after which an event of probability `p` is missed
 * with probability at most `failure_bound`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid.
 */
enum LtStatus lt_chernoff_trials(const char *p, const char *failure_bound, uint64_t *out);

/**
 * The last error message on this thread, or null. Valid until the next
 * call into the library on this thread.
 */
const char *lt_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void lt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINTEST_H */
