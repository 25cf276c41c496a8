/* C interface for the hyperlie library.
 *
 * Conventions: a configuration is 9 doubles (three R^3 vectors, row-major);
 * matrices are row-major. Functions returning int use the HYPERLIE_* error
 * codes below; 0 means success.
 */

#ifndef HYPERLIE_H
#define HYPERLIE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define HYPERLIE_OK 0
#define HYPERLIE_ERR_NULL 1
#define HYPERLIE_ERR_DEGENERATE 2
#define HYPERLIE_ERR_INVALID_ARGUMENT 3
#define HYPERLIE_ERR_NOT_ON_LEAF 4
#define HYPERLIE_ERR_NUMERICAL 5

/* Opaque handle to an integrated trajectory. */
typedef struct HyperlieTrajectory HyperlieTrajectory;

/* Scalar triple product <a1, [a2, a3]> of the configuration `a` (9 doubles).
 * Returns NaN if `a` is NULL. */
double hyperlie_phi(const double *a);

/* Writes the five Casimir values of `a` into `out` (5 doubles). */
int hyperlie_casimirs(const double *a, double *out);

/* Canonicalizing rotation of `a`: writes the rotation into `o` (9 doubles,
 * row-major) and the leaf parameters into `q` and `r`. `*anti` is set to 1
 * when the input lies in the positive region, where the map reverses the
 * orientation of the third slot. */
int hyperlie_canonicalize(const double *a, double *o, double *q, double *r,
                          int *anti);

/* Writes the 9x9 matrix of the k-th bivector (k = 1, 2, 3) at `a` into `out`
 * (81 doubles, row-major). */
int hyperlie_pi_matrix(int k, const double *a, double *out);

/* Integrates the flow backward from `s0` (9 doubles: B1, B2, B3) over
 * [-t_total, 0] with the given step. On success stores an owned handle in
 * `*out`; release it with hyperlie_trajectory_free. */
int hyperlie_nahm_solve(const double *s0, double t_total, double step,
                        HyperlieTrajectory **out);

/* Number of stored samples; 0 for NULL. */
size_t hyperlie_trajectory_len(const HyperlieTrajectory *h);

/* Copies sample `i`: its time into `*t` and the nine components into `out`.
 * Sample 0 is t = 0; times decrease with the index. */
int hyperlie_trajectory_sample(const HyperlieTrajectory *h, size_t i,
                               double *t, double *out);

/* Moduli isometry check on a stored trajectory. `diag_errors` receives 4
 * relative errors; `*intertwine_ok` is 1 when the complex-structure
 * correspondence holds. */
int hyperlie_isometry_check(const HyperlieTrajectory *h, double *diag_errors,
                            double *offdiag_max, double *frame_table_error,
                            int *intertwine_ok);

/* Releases a trajectory handle; NULL is a no-op. */
void hyperlie_trajectory_free(HyperlieTrajectory *h);

/* Static description of an error code. */
const char *hyperlie_error_message(int code);

#ifdef __cplusplus
}
#endif

#endif /* HYPERLIE_H */
