#ifndef L2GROWTH_H
#define L2GROWTH_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum L2Status {
  L2_STATUS_OK = 0,
  L2_STATUS_NULL_POINTER = 1,
  L2_STATUS_INVALID_UTF8 = 2,
  L2_STATUS_INVALID_INPUT = 3,
  L2_STATUS_NOT_FINITE_INDEX = 4,
  L2_STATUS_CAP_EXCEEDED = 5,
  L2_STATUS_NOT_ABELIAN = 6,
  L2_STATUS_HYPOTHESIS_UNVERIFIED = 7,
  L2_STATUS_OVERFLOW = 8,
  L2_STATUS_MISMATCH = 9,
  L2_STATUS_PANIC = 10,
} L2Status;

/**
 * An equivariant chain complex.
 */
typedef struct L2Complex L2Complex;

/**
 * A finite quotient of the group of an [`L2Complex`], with the subgroup's
 * short length.
 */
typedef struct L2Quotient L2Quotient;

/**
 * A bound report.
 */
typedef struct L2Report L2Report;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *l2_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void l2_string_free(char *s);

/**
 * Parses a JSON complex document.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out_complex` a writable pointer.
 */
enum L2Status l2_complex_from_json(const char *json, struct L2Complex **out_complex);

/**
 * Reads a JSON complex document from a file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out_complex` a writable pointer.
 */
enum L2Status l2_complex_from_file(const char *path, struct L2Complex **out_complex);

/**
 * Serialises a complex back to JSON; free the result with
 * [`l2_string_free`].
 *
 * # Safety
 * `complex` must be a live handle and `out_json` a writable pointer.
 */
enum L2Status l2_complex_to_json(const struct L2Complex *complex, char **out_json);

/**
 * Top dimension of a complex, or 0 for null.
 *
 * # Safety
 * `complex` must be null or a live handle.
 */
size_t l2_complex_top(const struct L2Complex *complex);

/**
 * Number of equivariant cells in dimension `dim`, or 0 outside the range.
 *
 * # Safety
 * `complex` must be null or a live handle.
 */
size_t l2_complex_cells(const struct L2Complex *complex, size_t dim);

/**
 * # Safety
 * `complex` must be null or a handle not yet freed.
 */
void l2_complex_free(struct L2Complex *complex);

/**
 * Finite quotient by a subgroup given as lattice rows (`"2 0; 0 3"`, or
 * `"12"` in rank one) or as `"mod m"` for a congruence subgroup.
 *
 * # Safety
 * `complex` must be a live handle, `subgroup` a nul-terminated string and
 * `out_quotient` a writable pointer.
 */
enum L2Status l2_quotient_new(const struct L2Complex *complex,
                              const char *subgroup,
                              struct L2Quotient **out_quotient);

/**
 * Index of the subgroup, or 0 for null.
 *
 * # Safety
 * `quotient` must be null or a live handle.
 */
size_t l2_quotient_order(const struct L2Quotient *quotient);

/**
 * Short length of the subgroup; 0 when the subgroup is trivial and the
 * length is infinite, or for null.
 *
 * # Safety
 * `quotient` must be null or a live handle.
 */
uint64_t l2_quotient_short(const struct L2Quotient *quotient);

/**
 * # Safety
 * `quotient` must be null or a handle not yet freed.
 */
void l2_quotient_free(struct L2Quotient *quotient);

/**
 * Betti number `b_dim` of the finite cover, by exact rank.
 *
 * # Safety
 * Handles must be live and built from the same complex; `out_betti` must
 * be writable.
 */
enum L2Status l2_betti(const struct L2Complex *complex,
                       const struct L2Quotient *quotient,
                       size_t dim,
                       size_t *out_betti);

/**
 * Betti number by summing kernel dimensions over characters; free abelian
 * groups only. Returns [`L2Status::Mismatch`] if it disagrees with the rank
 * computation, with the character value still written.
 *
 * # Safety
 * As for [`l2_betti`].
 */
enum L2Status l2_betti_characters(const struct L2Complex *complex,
                                  const struct L2Quotient *quotient,
                                  size_t dim,
                                  size_t *out_betti);

/**
 * Spectral-gap bound `4 a [G:G'] exp(-M short)` for a gap `lambda0`,
 * verified before the bound is reported.
 *
 * # Safety
 * As for [`l2_betti`], with `out_report` writable.
 */
enum L2Status l2_gap_bound(const struct L2Complex *complex,
                           const struct L2Quotient *quotient,
                           size_t dim,
                           double lambda0,
                           struct L2Report **out_report);

/**
 * Sublogarithmic bound `C [G:G'] / log short`.
 *
 * # Safety
 * As for [`l2_gap_bound`].
 */
enum L2Status l2_sublog_bound(const struct L2Complex *complex,
                              const struct L2Quotient *quotient,
                              size_t dim,
                              struct L2Report **out_report);

/**
 * Bound value, or NaN for null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double l2_report_bound(const struct L2Report *report);

/**
 * Exact Betti number the bound was compared with.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t l2_report_measured(const struct L2Report *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool l2_report_satisfied(const struct L2Report *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool l2_report_hypothesis_verified(const struct L2Report *report);

/**
 * Human-readable report with every constant; free with [`l2_string_free`].
 * Null for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *l2_report_to_string(const struct L2Report *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void l2_report_free(struct L2Report *report);

/**
 * Runs a verification suite (`"all"`, `"traces"`, `"sandwich"`,
 * `"stripes"` or `"bounds"`) and sums the pass counts. Returns
 * [`L2Status::Mismatch`] when any check fails.
 *
 * # Safety
 * `suite` must be a nul-terminated string; `passed` and `total` writable.
 */
enum L2Status l2_verify(const char *suite, uint64_t seed, size_t *passed, size_t *total);

/**
 * Seed used by the command-line `verify` when none is given.
 */
uint64_t l2_default_seed(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* L2GROWTH_H */
