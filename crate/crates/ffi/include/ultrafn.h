#ifndef ULTRAFN_H
#define ULTRAFN_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UfStatus {
  UF_STATUS_OK = 0,
  UF_STATUS_NULL_POINTER = 1,
  UF_STATUS_INVALID_ARGUMENT = 2,
  UF_STATUS_DIMENSION_MISMATCH = 3,
  UF_STATUS_EXTERIOR_POINT = 4,
  UF_STATUS_RESOURCE_LIMIT = 5,
  UF_STATUS_NUMERICAL_FAILURE = 6,
  UF_STATUS_UNSUPPORTED = 7,
  UF_STATUS_BUFFER_TOO_SMALL = 8,
  UF_STATUS_PANIC = 99,
} UfStatus;

typedef enum UfFamily {
  UF_FAMILY_SPECTRAL_SINE = 0,
  UF_FAMILY_FEM_P1 = 1,
} UfFamily;

// Opaque handle to one discretization level.
typedef struct UfLevel UfLevel;

// Energy decomposition at one point-mass position.
typedef struct UfEnergyReport {
  double elastic;
  double point_value;
  double total;
  double electrostatic;
} UfEnergyReport;

// Result of `uf_minimize`; only the first `dim` entries of `q` are used.
typedef struct UfMinimum {
  double q[2];
  size_t dim;
  double f_min;
  size_t iterations;
  size_t ties;
} UfMinimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a level on the box `[lower, upper]` of dimension `dim` (1 or 2).
// `max_n = 0` selects the default size cap. On success `*out` owns the new
// handle.
//
// # Safety
// `lower` and `upper` must point to `dim` doubles; `out` must be writable.
enum UfStatus uf_level_new(enum UfFamily family,
                           size_t dim,
                           const double *lower,
                           const double *upper,
                           uint32_t level,
                           size_t max_n,
                           struct UfLevel **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `level` must come from `uf_level_new` and must not be used afterwards.
void uf_level_free(struct UfLevel *level);

// Number of basis functions, or 0 for a null handle.
//
// # Safety
// `level` must be null or a live handle.
size_t uf_level_dimension(const struct UfLevel *level);

// Spatial dimension (1 or 2), or 0 for a null handle.
//
// # Safety
// `level` must be null or a live handle.
size_t uf_level_spatial_dim(const struct UfLevel *level);

// Writes the value of every basis function at `q` into `out`.
//
// # Safety
// `q` must point to the level's spatial dimension of doubles and `out` to
// `out_len` writable doubles.
enum UfStatus uf_eval_basis(const struct UfLevel *level,
                            const double *q,
                            double *out,
                            size_t out_len);

// Coefficients of the point-evaluation representer at `q`.
//
// # Safety
// As for `uf_eval_basis`.
enum UfStatus uf_delta_coefficients(const struct UfLevel *level,
                                    const double *q,
                                    double *out,
                                    size_t out_len);

// Coefficients of the membrane deflection under a unit point mass at `q`.
// `report` may be null.
//
// # Safety
// As for `uf_eval_basis`; `report`, if non-null, must be writable.
enum UfStatus uf_solve_point_source(const struct UfLevel *level,
                                    const double *q,
                                    double *out,
                                    size_t out_len,
                                    struct UfEnergyReport *report);

// Energy decomposition with the point mass at `q`.
//
// # Safety
// `q` must point to the level's spatial dimension of doubles; `out` must be
// writable.
enum UfStatus uf_energy_at(const struct UfLevel *level,
                           const double *q,
                           struct UfEnergyReport *out);

// Minimizes the energy over the point position. `grid = 0` and `tol <= 0`
// select the defaults (33 points per axis, 1e-8).
//
// # Safety
// `out` must be writable.
enum UfStatus uf_minimize(const struct UfLevel *level,
                          size_t grid,
                          double tol,
                          struct UfMinimum *out);

// Message of the last failure on this thread, or null if none. The string
// stays valid until the next failing call on the same thread.
const char *uf_last_error(void);

// Static name of a status code.
const char *uf_status_name(enum UfStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ULTRAFN_H */
