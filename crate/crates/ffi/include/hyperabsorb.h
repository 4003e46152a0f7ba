#ifndef HYPERABSORB_H
#define HYPERABSORB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HaStatus {
  HA_STATUS_OK = 0,
  HA_STATUS_NULL_POINTER = 1,
  HA_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A numerical guard tripped: zero norm, degenerate spectrum or an
   * unnormalized state.
   */
  HA_STATUS_NUMERICAL = 3,
  HA_STATUS_PANIC = 4,
} HaStatus;

typedef enum HaKind {
  HA_KIND_ENTANGLED = 0,
  HA_KIND_MIXTURE = 1,
  HA_KIND_PRODUCT = 2,
} HaKind;

typedef enum HaClassification {
  HA_CLASSIFICATION_SEPARABLE = 0,
  HA_CLASSIFICATION_SINGLE_DOF_ENTANGLED = 1,
  HA_CLASSIFICATION_PRODUCT_FORM_HYPERENTANGLED = 2,
  HA_CLASSIFICATION_NON_PRODUCT_HYPERENTANGLED = 3,
} HaClassification;

/**
 * Opaque scenario handle.
 */
typedef struct HaScenario HaScenario;

typedef struct HaComplex {
  double re;
  double im;
} HaComplex;

/**
 * Flat evaluation result. The Λ fields are meaningful only when
 * `has_lambda` is set (entangled preparation, real amplitudes).
 */
typedef struct HaReport {
  double p_double;
  double p_a_only;
  double p_b_only;
  double p_none;
  double p_double_indistinguishable;
  double entropy_initial;
  double entropy_final;
  bool has_lambda;
  double entropy_final_lambda;
  double k_value;
  bool lambda_verdict;
  bool spatial_internal_product;
  enum HaClassification classification;
  bool linear_regime_warning;
} HaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a scenario with overlaps `⟨φ|φ̄⟩ = a` and `⟨ϕ|ϕ̄⟩ = c`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HaStatus ha_scenario_new(enum HaKind kind,
                              struct HaComplex alpha,
                              struct HaComplex beta,
                              struct HaComplex gamma,
                              struct HaComplex delta,
                              double overlap_a,
                              double overlap_c,
                              struct HaScenario **out);

/**
 * Replaces the overlaps of a scenario with the Gaussian recoil model
 * shared by both atoms.
 *
 * # Safety
 * `scenario` must be a live handle from [`ha_scenario_new`].
 */
enum HaStatus ha_scenario_set_gaussian_recoil(struct HaScenario *scenario,
                                              double sigma_x,
                                              double k_recoil);

/**
 * Releases a handle. Null is accepted and ignored.
 *
 * # Safety
 * `scenario` must be null or a live handle not used afterwards.
 */
void ha_scenario_free(struct HaScenario *scenario);

/**
 * Evaluates a scenario. A non-positive `product_tolerance` selects the
 * default.
 *
 * # Safety
 * `scenario` must be a live handle and `out` valid for one write.
 */
enum HaStatus ha_scenario_evaluate(const struct HaScenario *scenario,
                                   double product_tolerance,
                                   struct HaReport *out);

/**
 * Base-2 Shannon entropy of `n` probabilities.
 *
 * # Safety
 * `probabilities` must point to `n` readable doubles; `out` must be valid
 * for one write.
 */
enum HaStatus ha_entropy_bits(const double *probabilities, size_t n, double *out);

/**
 * `exp(−k²σ²/2)`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum HaStatus ha_gaussian_recoil_overlap(double sigma_x, double k_recoil, double *out);

/**
 * Splits an overlap `s` into `(a, b) = (s, √(1 − s²))`.
 *
 * # Safety
 * `a` and `b` must be valid for one write each.
 */
enum HaStatus ha_decompose_overlap(double s, double *a, double *b);

/**
 * Runs the built-in reproduction checks. `passed` and `total` receive
 * the counts; the status is `Ok` even when some checks fail.
 *
 * # Safety
 * `passed` and `total` must be valid for one write each.
 */
enum HaStatus ha_check_run(uint32_t *passed, uint32_t *total);

/**
 * Message for the last failure on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ha_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ha_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERABSORB_H */
