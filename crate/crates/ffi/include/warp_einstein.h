#ifndef WARP_EINSTEIN_H
#define WARP_EINSTEIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WeEndpointKind {
  WE_ENDPOINT_KIND_BOUNDARY = 0,
  WE_ENDPOINT_KIND_CRITICAL_MIN = 1,
  WE_ENDPOINT_KIND_CRITICAL_MAX = 2,
  WE_ENDPOINT_KIND_INFINITE = 3,
  WE_ENDPOINT_KIND_STOPPED = 4,
} WeEndpointKind;

// Status code of every fallible call.
typedef enum WeStatus {
  WE_STATUS_OK = 0,
  // The verification ran and the profile failed it.
  WE_STATUS_VERDICT_FAIL = 1,
  // Bad parameters, family name, constants or grid.
  WE_STATUS_INVALID_ARGUMENT = 2,
  // Singularity, blow-up or non-convergence.
  WE_STATUS_NUMERICAL = 3,
  WE_STATUS_NULL_POINTER = 4,
  WE_STATUS_PANIC = 5,
} WeStatus;

// Opaque profile handle.
typedef struct WeProfile WeProfile;

// Dimensions and Einstein constants.
typedef struct WeParams {
  uint32_t n;
  uint32_t m;
  double lambda;
  double k;
} WeParams;

// Initial data. `ddf` is read only when `has_ddf` is nonzero.
typedef struct WeInitial {
  double t;
  double u;
  double du;
  double f;
  double df;
  int32_t has_ddf;
  double ddf;
} WeInitial;

// One sampled point of a profile.
typedef struct WePoint {
  double t;
  double u;
  double du;
  double ddu;
  double dddu;
  double f;
  double df;
  double ddf;
} WePoint;

// Classification of one end; `t_end` is meaningful when `bounded` is nonzero.
typedef struct WeEndpoint {
  enum WeEndpointKind kind;
  int32_t bounded;
  double t_end;
} WeEndpoint;

// Residual norms of a verification.
typedef struct WeResiduals {
  int32_t passed;
  double r_second;
  double r_compat;
  double r_first;
  double r_second_norm;
  double r_compat_norm;
  double r_first_norm;
  double mu_min;
  double mu_max;
  double mu_mean;
} WeResiduals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t we_last_error(char *buf, size_t len);

// Samples a catalog family on `nodes` points strictly inside its domain.
// NaN constants take the family defaults.
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum WeStatus we_catalog_sample(const char *name,
                                uint32_t n,
                                uint32_t m,
                                double c,
                                double kbar,
                                double k,
                                size_t nodes,
                                struct WeProfile **out);

// Builds a profile from sampled `t`, `u`, `f`; derivatives are
// reconstructed by finite differences.
//
// # Safety
// `t`, `u`, `f` must each point to `len` readable doubles; `out` writable.
enum WeStatus we_profile_from_arrays(struct WeParams p,
                                     const double *t,
                                     const double *u,
                                     const double *f,
                                     size_t len,
                                     struct WeProfile **out);

// Integrates the initial-value problem over `[t_lo, t_hi]` (infinite ends
// allowed) and samples `nodes` points of the covered interval.
//
// # Safety
// `out` must be writable.
enum WeStatus we_integrate(struct WeParams p,
                           struct WeInitial init,
                           double t_lo,
                           double t_hi,
                           double tol,
                           int32_t cross_boundary,
                           size_t nodes,
                           struct WeProfile **out);

// Releases a profile. Null is ignored.
//
// # Safety
// `profile` must come from this library and not be used afterwards.
void we_profile_free(struct WeProfile *profile);

// Number of points; 0 for null.
//
// # Safety
// `profile` must be null or a live handle.
size_t we_profile_len(const struct WeProfile *profile);

// # Safety
// `profile` must be a live handle and `out` writable.
enum WeStatus we_profile_point(const struct WeProfile *profile, size_t index, struct WePoint *out);

// Classification of both ends as recorded on the profile.
//
// # Safety
// `profile` must be a live handle; `left` and `right` writable.
enum WeStatus we_profile_endpoints(const struct WeProfile *profile,
                                   struct WeEndpoint *left,
                                   struct WeEndpoint *right);

// Verifies the profile against the reduced equations. Returns
// `VerdictFail` when the check ran but did not pass; `out` is filled either way.
//
// # Safety
// `profile` must be a live handle and `out` writable.
enum WeStatus we_verify(const struct WeProfile *profile, double tol, struct WeResiduals *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARP_EINSTEIN_H */
