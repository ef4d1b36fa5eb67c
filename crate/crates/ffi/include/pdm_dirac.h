#ifndef PDM_DIRAC_H
#define PDM_DIRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Result of every call.
 */
typedef enum PdmStatus {
  PDM_STATUS_OK = 0,
  PDM_STATUS_NULL_POINTER = 1,
  PDM_STATUS_INVALID_ARGUMENT = 2,
  PDM_STATUS_DOMAIN = 3,
  PDM_STATUS_SINGULAR = 4,
  PDM_STATUS_NUMERICAL = 5,
  PDM_STATUS_BUFFER_TOO_SMALL = 6,
  PDM_STATUS_IO = 7,
  PDM_STATUS_PANIC = 8,
} PdmStatus;

/**
 * Which operator the PT check inspects.
 */
typedef enum PdmOperator {
  /**
   * The two-component Dirac operator.
   */
  PDM_OPERATOR_COUPLED = 0,
  /**
   * The scalar second-order operator for the upper component.
   */
  PDM_OPERATOR_DECOUPLED = 1,
} PdmOperator;

/**
 * Spinor involution used by the PT check.
 */
typedef enum PdmInvolution {
  PDM_INVOLUTION_IDENTITY = 0,
  PDM_INVOLUTION_SIGMA3 = 1,
} PdmInvolution;

/**
 * Opaque mass profile.
 */
typedef struct PdmProfile PdmProfile;

/**
 * Opaque list of energies.
 */
typedef struct PdmSpectrum PdmSpectrum;

typedef struct PdmPtReport {
  size_t dim;
  double delta;
  size_t n_real;
  size_t n_conjugate_pairs;
  size_t n_complex;
  double max_im_eig;
  double closure_error;
} PdmPtReport;

typedef struct PdmFwReport {
  size_t window_nodes;
  double c1_deviation;
  double c2_deviation;
  double c2_truncation;
  double full_h_residual;
} PdmFwReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pdm_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * always NUL-terminated when `cap > 0`). Returns the length of the full
 * message excluding the terminator, or 0 if the last call succeeded.
 *
 * # Safety
 * `buf` must be NULL or point to at least `cap` writable bytes.
 */
size_t pdm_last_error_message(char *buf, size_t cap);

/**
 * Linear mass m(x) = mu·x on [0, x_hi].
 *
 * # Safety
 * `out` must be a valid pointer to a `PdmProfile*`.
 */
enum PdmStatus pdm_profile_linear(double mu, double x_hi, struct PdmProfile **out);

/**
 * Hyperbolic mass m0·sech(a·x)^(1/2) on [x_lo, x_hi].
 *
 * # Safety
 * `out` must be a valid pointer to a `PdmProfile*`.
 */
enum PdmStatus pdm_profile_hyperbolic(double m0,
                                      double a,
                                      double x_lo,
                                      double x_hi,
                                      struct PdmProfile **out);

/**
 * # Safety
 * `p` must be NULL or a handle from a `pdm_profile_*` constructor not yet freed.
 */
void pdm_profile_free(struct PdmProfile *p);

/**
 * Mass and its first two derivatives at `x`. Any output pointer may be NULL.
 *
 * # Safety
 * `p` must be a live profile handle; non-NULL outputs must be writable.
 */
enum PdmStatus pdm_profile_mass(const struct PdmProfile *p,
                                double x,
                                double *m,
                                double *dm,
                                double *d2m);

/**
 * Effective potential of the decoupled equation with V = i m'/(2m), sampled
 * at `n` uniform nodes on [x_lo, x_hi]. Writes `n` values to each of `re`
 * and `im`.
 *
 * # Safety
 * `p` must be a live profile handle; `re` and `im` must hold `n` doubles.
 */
enum PdmStatus pdm_effective_potential(const struct PdmProfile *p,
                                       double x_lo,
                                       double x_hi,
                                       size_t n,
                                       double energy,
                                       double *re,
                                       double *im);

/**
 * The `k` lowest energies of the linear mass on [0, x_hi] with `n` interior nodes.
 *
 * # Safety
 * `out` must be a valid pointer to a `PdmSpectrum*`.
 */
enum PdmStatus pdm_linear_spectrum(double mu,
                                   double x_hi,
                                   size_t n,
                                   size_t k,
                                   struct PdmSpectrum **out);

/**
 * Number of energies held by `s`, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live spectrum handle.
 */
size_t pdm_spectrum_len(const struct PdmSpectrum *s);

/**
 * Copies the energies into `out`, which must hold `pdm_spectrum_len(s)` values.
 *
 * # Safety
 * `s` must be a live spectrum handle; `out` must hold `cap` doubles.
 */
enum PdmStatus pdm_spectrum_energies(const struct PdmSpectrum *s, double *out, size_t cap);

/**
 * # Safety
 * `s` must be NULL or a spectrum handle not yet freed.
 */
void pdm_spectrum_free(struct PdmSpectrum *s);

/**
 * Transmission and reflection probabilities of the hyperbolic barrier at energy E > 0.
 *
 * # Safety
 * `t` and `r` must be writable.
 */
enum PdmStatus pdm_transmission(double m0, double a, double energy, double *t, double *r);

/**
 * PT diagnostics on an `n`-node grid over the profile's domain. Hyperbolic
 * profiles need a domain symmetric about 0. Linear profiles are extended
 * oddly to [−x_hi, x_hi] and only support the coupled operator.
 *
 * # Safety
 * `p` must be a live profile handle; `out` must be writable.
 */
enum PdmStatus pdm_pt_check(const struct PdmProfile *p,
                            size_t n,
                            enum PdmOperator op,
                            enum PdmInvolution involution,
                            struct PdmPtReport *out);

/**
 * Foldy–Wouthuysen commutator deviations on [window_lo, window_hi], using
 * an `n`-node grid over the profile's domain.
 *
 * # Safety
 * `p` must be a live profile handle; `out` must be writable.
 */
enum PdmStatus pdm_fw_check(const struct PdmProfile *p,
                            size_t n,
                            double window_lo,
                            double window_hi,
                            struct PdmFwReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDM_DIRAC_H */
