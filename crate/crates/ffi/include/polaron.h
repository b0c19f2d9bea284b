#ifndef POLARON_H
#define POLARON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define POLARON_INIT_HYDROGENIC 0

#define POLARON_INIT_GAUSSIAN 1

#define POLARON_CUTOFF_BUMP 0

#define POLARON_CUTOFF_GAUSSIAN 1

#define POLARON_CUTOFF_ONE 2

typedef enum PolaronStatus {
  POLARON_STATUS_OK = 0,
  POLARON_STATUS_INVALID_ARGUMENT = 1,
  POLARON_STATUS_NULL_POINTER = 2,
  POLARON_STATUS_CONVERGENCE_FAILURE = 3,
  POLARON_STATUS_NUMERICAL_FAILURE = 4,
  POLARON_STATUS_DOMAIN_FAILURE = 5,
  POLARON_STATUS_STEP_SIZE_FAILURE = 6,
  POLARON_STATUS_PANIC = 7,
} PolaronStatus;

// Momentum-space profile of a [`PolaronState`].
typedef struct PolaronProfile PolaronProfile;

// Ground state of the Pekar functional on a radial grid.
typedef struct PolaronState PolaronState;

typedef struct PolaronSolverOptions {
  size_t n;
  double rmax;
  // `POLARON_INIT_*`
  uint32_t init;
  double mixing;
  double tol_energy;
  double tol_psi;
  size_t max_iter;
} PolaronSolverOptions;

typedef struct PolaronEnergies {
  double kinetic;
  double coulomb;
  double energy;
  double mu;
  double residual;
  size_t iterations;
} PolaronEnergies;

typedef struct PolaronCutoff {
  double eps;
  // `POLARON_CUTOFF_*`
  uint32_t shape;
  double support_radius;
} PolaronCutoff;

typedef struct PolaronMassBound {
  double eps;
  double r;
  double q1;
  double q2;
  double f;
  // `+inf` when `f <= 0`.
  double m_lower;
  bool f_nonpositive;
  double identity_neg32;
  double identity_3;
  double mass_coeff;
} PolaronMassBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the last failure on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *polaron_last_error_message(void);

struct PolaronSolverOptions polaron_solver_options_default(void);

// Solve for the Pekar minimizer. On success `*out` receives a new handle.
//
// # Safety
// `opts` must point to a valid options struct and `out` to writable storage.
enum PolaronStatus polaron_solve(const struct PolaronSolverOptions *opts,
                                 struct PolaronState **out);

// # Safety
// `state` must be null or a handle from [`polaron_solve`] not yet freed.
void polaron_state_free(struct PolaronState *state);

// # Safety
// `state` must be a live handle and `out` writable.
enum PolaronStatus polaron_state_energies(const struct PolaronState *state,
                                          struct PolaronEnergies *out);

// Number of radial nodes, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t polaron_state_len(const struct PolaronState *state);

// Copy the radial nodes into `buf`, which must hold exactly
// [`polaron_state_len`] values.
//
// # Safety
// `state` must be a live handle and `buf` valid for `len` writes.
enum PolaronStatus polaron_state_radii(const struct PolaronState *state, double *buf, size_t len);

// Copy `ψ` at the radial nodes into `buf`.
//
// # Safety
// `state` must be a live handle and `buf` valid for `len` writes.
enum PolaronStatus polaron_state_psi(const struct PolaronState *state, double *buf, size_t len);

// `(8π/3) ∫ ψ⁴`
//
// # Safety
// `state` must be a live handle and `out` writable.
enum PolaronStatus polaron_mass_coefficient(const struct PolaronState *state, double *out);

// Transform `state` onto `n` momentum nodes on `(0, pmax]`.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum PolaronStatus polaron_profile_new(const struct PolaronState *state,
                                       size_t n,
                                       double pmax,
                                       struct PolaronProfile **out);

// # Safety
// `profile` must be null or a handle from [`polaron_profile_new`] not yet freed.
void polaron_profile_free(struct PolaronProfile *profile);

// # Safety
// `profile` must be null or a live handle.
size_t polaron_profile_len(const struct PolaronProfile *profile);

// Copy `ψ̂` at the momentum nodes into `buf`.
//
// # Safety
// `profile` must be a live handle and `buf` valid for `len` writes.
enum PolaronStatus polaron_profile_psi_hat(const struct PolaronProfile *profile,
                                           double *buf,
                                           size_t len);

// Evaluate the inverse-mass bound for one cutoff. `reduced_n` and
// `angular_nodes` set the double-integral quadrature.
//
// # Safety
// `profile` and `state` must be live handles (the profile built from that
// state), `cutoff` readable and `out` writable.
enum PolaronStatus polaron_mass_bound(const struct PolaronProfile *profile,
                                      const struct PolaronState *state,
                                      const struct PolaronCutoff *cutoff,
                                      size_t reduced_n,
                                      size_t angular_nodes,
                                      struct PolaronMassBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARON_H */
