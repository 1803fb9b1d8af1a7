/* C interface to the hadlat lattice-code workbench. */

#ifndef HADLAT_H
#define HADLAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this interface.
 */
typedef enum HadlatStatus {
  HADLAT_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  HADLAT_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or malformed.
   */
  HADLAT_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A matrix failed the orthogonality check.
   */
  HADLAT_STATUS_NOT_ORTHOGONAL = 3,
  /**
   * A rotation file could not be read or parsed.
   */
  HADLAT_STATUS_PARSE_ERROR = 4,
  /**
   * The request exceeds the supported dimension or size limits.
   */
  HADLAT_STATUS_TOO_LARGE = 5,
  /**
   * The operation is not available for these inputs.
   */
  HADLAT_STATUS_UNSUPPORTED = 6,
  /**
   * An internal numerical failure.
   */
  HADLAT_STATUS_RUNTIME_ERROR = 7,
} HadlatStatus;

/**
 * Opaque lattice handle; create with `hadlat_lattice_builtin` or
 * `hadlat_lattice_load`, release with `hadlat_lattice_free`.
 */
typedef struct HadlatLattice HadlatLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Short static description of a status code.
 */
const char *hadlat_status_message(enum HadlatStatus status);

/**
 * Builds a builtin lattice: `identity`, `hadamard` (power-of-two dimension)
 * or `bcc` (dimension 3).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_builtin(const char *name,
                                         uintptr_t dim,
                                         struct HadlatLattice **out);

/**
 * Loads and validates a rotation file, yielding its unit-volume lattice.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_load(const char *path, struct HadlatLattice **out);

/**
 * Releases a lattice handle. Null is accepted and ignored.
 *
 * # Safety
 * `lattice` must be a pointer previously returned by this library, or null.
 */
void hadlat_lattice_free(struct HadlatLattice *lattice);

/**
 * Dimension of the lattice; zero for a null handle.
 *
 * # Safety
 * `lattice` must be a valid handle or null.
 */
uintptr_t hadlat_lattice_dim(const struct HadlatLattice *lattice);

/**
 * Covolume |det M| of the lattice.
 *
 * # Safety
 * `lattice` must be a valid handle; `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_volume(const struct HadlatLattice *lattice, double *out);

/**
 * Minimal squared Euclidean norm over nonzero lattice vectors.
 *
 * # Safety
 * `lattice` must be a valid handle; `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_min_norm_sq(const struct HadlatLattice *lattice, double *out);

/**
 * Minimal L1 norm over nonzero vectors with squared L2 norm within
 * `search_bound` (which must be at least the dimension).
 *
 * # Safety
 * `lattice` must be a valid handle; `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_min_l1_norm(const struct HadlatLattice *lattice,
                                             double search_bound,
                                             double *out);

/**
 * Whether the minimal vectors span the ambient space.
 *
 * # Safety
 * `lattice` must be a valid handle; `out` a valid pointer.
 */
enum HadlatStatus hadlat_lattice_is_well_rounded(const struct HadlatLattice *lattice, bool *out);

/**
 * Mean and variance of the squared Rician fade (mean is always one).
 *
 * # Safety
 * `out_mean` and `out_var` must be valid pointers.
 */
enum HadlatStatus hadlat_moments_h2(double k, double *out_mean, double *out_var);

/**
 * Rician fade density at `h` for factor `k`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HadlatStatus hadlat_rician_pdf(double h, double k, double *out);

/**
 * Noise variance for a volume-to-noise ratio in dB.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HadlatStatus hadlat_vnr_to_sigma2(double vnr_db, double volume, uintptr_t dim, double *out);

/**
 * Monte Carlo vector error rate of the carved constellation (`q` points per
 * dimension) under Rician factor `k` at the given VNR. Deterministic in
 * `(seed, trials)` regardless of thread count.
 *
 * # Safety
 * `lattice` must be a valid handle; `out_rate` and `out_stderr` valid pointers.
 */
enum HadlatStatus hadlat_error_rate(const struct HadlatLattice *lattice,
                                    uint32_t q,
                                    double k,
                                    double vnr_db,
                                    uint64_t trials,
                                    uint64_t seed,
                                    double *out_rate,
                                    double *out_stderr);

/**
 * Monte Carlo union bound on the pairwise error probability, truncated at
 * squared norm `bound` (pass zero to use four times the minimal norm).
 *
 * # Safety
 * `lattice` must be a valid handle; `out_value` and `out_stderr` valid pointers.
 */
enum HadlatStatus hadlat_pep_bound_mc(const struct HadlatLattice *lattice,
                                      double k,
                                      double vnr_db,
                                      double bound,
                                      uint64_t trials,
                                      uint64_t seed,
                                      double *out_value,
                                      double *out_stderr);

/**
 * Small-fade-variance approximation of the same bound.
 *
 * # Safety
 * `lattice` must be a valid handle; `out_value` a valid pointer.
 */
enum HadlatStatus hadlat_pep_bound_approx(const struct HadlatLattice *lattice,
                                          double k,
                                          double vnr_db,
                                          double bound,
                                          double *out_value);

/**
 * Monte Carlo probability that the faded Sylvester Hadamard lattice of the
 * given power-of-two dimension is not well-rounded.
 *
 * # Safety
 * `out_estimate` and `out_stderr` must be valid pointers.
 */
enum HadlatStatus hadlat_nonwr_probability_mc(uintptr_t dim,
                                              double k,
                                              uint64_t trials,
                                              uint64_t seed,
                                              double *out_estimate,
                                              double *out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HADLAT_H */
