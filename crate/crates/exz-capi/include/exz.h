/* C interface to the exz extremal-polynomial library. */

#ifndef EXZ_H
#define EXZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum ExzStatus {
  /**
   * Success.
   */
  EXZ_STATUS_OK = 0,
  /**
   * Runtime failure (convergence, precision, sampling, I/O).
   */
  EXZ_STATUS_RUNTIME_ERROR = 1,
  /**
   * Invalid input: geometry, configuration, or parse errors.
   */
  EXZ_STATUS_INVALID_INPUT = 2,
  /**
   * Null handle or output pointer.
   */
  EXZ_STATUS_NULL_POINTER = 3,
  /**
   * Internal panic; state may be inconsistent.
   */
  EXZ_STATUS_PANIC = 4,
} ExzStatus;

/**
 * Weighted atomic measure handle.
 */
typedef struct ExzCloud ExzCloud;

/**
 * Planar domain handle.
 */
typedef struct ExzDomain ExzDomain;

/**
 * Polynomial sequence handle (recurrence form).
 */
typedef struct ExzSequence ExzSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes) and returns the full message length in bytes,
 * excluding the NUL. `buf` may be null when only the length is wanted.
 */
uintptr_t exz_last_error(char *buf, uintptr_t len);

/**
 * Frees a string returned by this library. Accepts null.
 */
void exz_string_free(char *s);

/**
 * Parses a domain from its JSON description.
 */
enum ExzStatus exz_domain_from_json(const char *json, struct ExzDomain **out);

/**
 * Frees a domain handle. Accepts null.
 */
void exz_domain_free(struct ExzDomain *d);

/**
 * Serializes a domain back to normalized JSON; free with `exz_string_free`.
 */
enum ExzStatus exz_domain_to_json(const struct ExzDomain *d, char **out);

/**
 * Euclidean diameter of the domain.
 */
enum ExzStatus exz_domain_diameter(const struct ExzDomain *d, double *out);

/**
 * Number of boundary corners.
 */
enum ExzStatus exz_domain_corner_count(const struct ExzDomain *d, uintptr_t *out);

/**
 * Writes 1 when the domain carries an inward corner on every hull
 * component, which predicts convergence of the full zero-counting
 * sequence; 0 otherwise.
 */
enum ExzStatus exz_domain_full_sequence_predicted(const struct ExzDomain *d, int32_t *out);

/**
 * Builds the area-orthonormal sequence up to degree `n_max` at the given
 * bit precision (minimum 128).
 */
enum ExzStatus exz_bergman(const struct ExzDomain *d,
                           uintptr_t n_max,
                           uint32_t precision_bits,
                           struct ExzSequence **out);

/**
 * Builds the monic Faber-type sequence for the segment [-half, half];
 * `half` is a decimal or fraction string such as "2" or "5/2".
 */
enum ExzStatus exz_faber_segment(const char *half,
                                 uintptr_t n_max,
                                 uint32_t precision_bits,
                                 struct ExzSequence **out);

/**
 * Frees a sequence handle. Accepts null.
 */
void exz_sequence_free(struct ExzSequence *s);

/**
 * Highest degree the sequence carries.
 */
enum ExzStatus exz_sequence_n_max(const struct ExzSequence *s, uintptr_t *out);

/**
 * Recurrence entry h_{row,col} rounded to double precision.
 */
enum ExzStatus exz_sequence_entry(const struct ExzSequence *s,
                                  uintptr_t row,
                                  uintptr_t col,
                                  double *out_re,
                                  double *out_im);

/**
 * Evaluates the degree-n polynomial at z = re + i*im, in double precision.
 */
enum ExzStatus exz_sequence_evaluate(const struct ExzSequence *s,
                                     double re,
                                     double im,
                                     uintptr_t n,
                                     double *out_re,
                                     double *out_im);

/**
 * Zeros of the degree-n polynomial, rounded to double precision, written
 * into caller buffers of length n.
 */
enum ExzStatus exz_sequence_zeros(const struct ExzSequence *s,
                                  uintptr_t n,
                                  double *out_re,
                                  double *out_im);

/**
 * Serializes the sequence (full precision) to JSON; free with
 * `exz_string_free`.
 */
enum ExzStatus exz_sequence_to_json(const struct ExzSequence *s, char **out);

/**
 * Restores a sequence from `exz_sequence_to_json` output.
 */
enum ExzStatus exz_sequence_from_json(const char *json, struct ExzSequence **out);

/**
 * Normalized zero-counting measure of the degree-n polynomial.
 */
enum ExzStatus exz_sequence_zero_cloud(const struct ExzSequence *s,
                                       uintptr_t n,
                                       struct ExzCloud **out);

/**
 * Greedy max-product boundary points with uniform weights, the surrogate
 * for the equilibrium measure.
 */
enum ExzStatus exz_leja_points(const struct ExzDomain *d,
                               uintptr_t count,
                               uintptr_t boundary_mesh,
                               struct ExzCloud **out);

/**
 * Logarithmic capacity estimate from a Leja cloud of `count` points.
 */
enum ExzStatus exz_capacity(const struct ExzDomain *d,
                            uintptr_t count,
                            uintptr_t boundary_mesh,
                            double *out);

/**
 * Sweeps the interior part of a measure onto the domain boundary by
 * walk-on-spheres sampling; exterior mass is rejected with
 * `EXZ_STATUS_INVALID_INPUT`.
 */
enum ExzStatus exz_balayage(const struct ExzDomain *d,
                            const struct ExzCloud *cloud,
                            uintptr_t samples_per_atom,
                            uint64_t seed,
                            double shell_epsilon,
                            struct ExzCloud **out);

/**
 * Frees a measure handle. Accepts null.
 */
void exz_cloud_free(struct ExzCloud *c);

/**
 * Number of atoms in the measure.
 */
enum ExzStatus exz_cloud_len(const struct ExzCloud *c, uintptr_t *out);

/**
 * Atom `i`: position and weight (weight rounded to double precision).
 */
enum ExzStatus exz_cloud_atom(const struct ExzCloud *c,
                              uintptr_t i,
                              double *out_re,
                              double *out_im,
                              double *out_weight);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EXZ_H */
