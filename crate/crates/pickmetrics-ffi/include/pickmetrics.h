#ifndef PICKMETRICS_H
#define PICKMETRICS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Disc kernels addressable over the ABI.
 */
typedef enum {
  PmKernel_Hardy = 0,
  PmKernel_Dirichlet = 1,
  /**
   * Weighted Dirichlet; the weight is the `a` argument.
   */
  PmKernel_WeightedDirichlet = 2,
} PmKernel;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum {
  PmStatus_Ok = 0,
  PmStatus_NullPointer = 1,
  PmStatus_DomainViolation = 2,
  PmStatus_DimensionMismatch = 3,
  PmStatus_InvalidParameter = 4,
  PmStatus_NonConvergence = 5,
  PmStatus_Overflow = 6,
  PmStatus_SeparationFailed = 7,
  PmStatus_NotFound = 8,
  PmStatus_Internal = 9,
} PmStatus;

/**
 * Opaque Gregory coefficient table (`c_1 .. c_n_max`).
 */
typedef struct PmCoeffTable PmCoeffTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a NUL-terminated static string.
 */
const char *pm_version(void);

/**
 * Build a coefficient table by the reciprocal-series recursion.
 * Returns null if `n_max == 0` or on internal failure.
 */
PmCoeffTable *pm_coeffs_new(uintptr_t n_max);

/**
 * Free a table returned by [`pm_coeffs_new`]. Null is a no-op.
 *
 * # Safety
 * `table` must be a pointer from `pm_coeffs_new` not yet freed.
 */
void pm_coeffs_free(PmCoeffTable *table);

/**
 * Number of coefficients held by the table (0 for null).
 *
 * # Safety
 * `table` must be null or a live pointer from `pm_coeffs_new`.
 */
uintptr_t pm_coeffs_len(const PmCoeffTable *table);

/**
 * Fetch `c_n` (1-based) from the table.
 *
 * # Safety
 * `table` must be null or a live pointer from `pm_coeffs_new`; `out` must
 * be null or writable.
 */
PmStatus pm_coeffs_get(const PmCoeffTable *table, uintptr_t n, double *out);

/**
 * `c_n` by the explicit integral, to absolute tolerance `tol`.
 */
PmStatus pm_gregory_integral(uintptr_t n, double tol, double *out);

/**
 * Kernel metric `delta(z, w)` of a disc kernel; `a` is read only for the
 * weighted Dirichlet kernel.
 */
PmStatus pm_kernel_delta(PmKernel kind,
                         double a,
                         double z_re,
                         double z_im,
                         double w_re,
                         double w_im,
                         double *out);

/**
 * Closed-form Dirichlet metric on the disc.
 */
PmStatus pm_dirichlet_metric(double z_re, double z_im, double w_re, double w_im, double *out);

/**
 * Pseudohyperbolic distance on the ball in C^dim; `z`/`w` hold `2*dim`
 * interleaved `re, im` values.
 *
 * # Safety
 * `z` and `w` must be null or point to `2*dim` readable doubles.
 */
PmStatus pm_pseudohyperbolic(uintptr_t dim, const double *z, const double *w, double *out);

/**
 * Poincare-Bergman distance `atanh(rho)`; fails with `Overflow` when the
 * points are numerically unresolvable.
 *
 * # Safety
 * `z` and `w` must be null or point to `2*dim` readable doubles.
 */
PmStatus pm_bergman(uintptr_t dim, const double *z, const double *w, double *out);

/**
 * Riemannian density of the Dirichlet metric at `z`.
 */
PmStatus pm_g_density(double z_re, double z_im, double *out);

/**
 * Dirichlet length of the radial segment `[0, r]`.
 */
PmStatus pm_radial_length(double r, double tol, double *out);

/**
 * Duren-Weir packing bound `(2/eps + 1)^{2d} / (1 - r^2)^d`.
 */
PmStatus pm_duren_weir_bound(uintptr_t d, double r, double eps, double *out);

/**
 * Growth envelope `1 - exp(-c sqrt(log(1/(1-|z|))))`.
 */
PmStatus pm_slow_growth_envelope(double c, double z_abs, double *out);

/**
 * Cardinality of the certified eps-separated circle lattice at radius `r`;
 * `SeparationFailed` below the radius threshold.
 *
 * # Safety
 * `out_len` must be null or writable.
 */
PmStatus pm_circle_lattice_size(double r, double eps, uintptr_t *out_len);

/**
 * First complement `u* = 1 - r*` on the grid `10^{-1} .. 10^{-k_max}` where
 * the circle-packing lower bound overtakes the Duren-Weir upper bound;
 * `NotFound` when the grid ends before the crossing.
 *
 * # Safety
 * `out_u` must be null or writable.
 */
PmStatus pm_obstruction_r_star(uintptr_t d,
                               double lip_upper,
                               double lip_lower,
                               double eps,
                               uint32_t k_max,
                               double *out_u);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PICKMETRICS_H */
