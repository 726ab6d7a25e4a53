#ifndef CYCLEMIX_H
#define CYCLEMIX_H

/* Generated by the cyclemix-ffi build script; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define CMX_OK 0

/**
 * Invalid argument, null pointer, or i/o failure.
 */
#define CMX_INVALID 2

/**
 * State-space enumeration would exceed the cap.
 */
#define CMX_CAP_EXCEEDED 3

/**
 * A numerical guard tripped.
 */
#define CMX_NUMERICAL 4

/**
 * Opaque handle to a built chain.
 */
typedef struct CmxModel CmxModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread; empty after a
 * success. The pointer stays valid until the next call into this library
 * from the same thread.
 */
const char *cmx_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cmx_version(void);

/**
 * Build a chain for a caller-supplied step law given as parallel arrays of
 * step sizes and weights.
 *
 * # Safety
 * `steps` and `weights` must point to `len` readable elements; `out` must
 * be a valid location to store the new handle. The handle must be released
 * with [`cmx_model_free`].
 */
int32_t cmx_model_new_constant(uint32_t n,
                               uint32_t k,
                               const int64_t *steps,
                               const double *weights,
                               size_t len,
                               struct CmxModel **out);

/**
 * Build the conditioned ±1 walk chain with clockwise rate `alpha` and
 * anticlockwise rate `beta`.
 *
 * # Safety
 * `out` must be a valid location to store the new handle.
 */
int32_t cmx_model_new_asep(uint32_t n,
                           uint32_t k,
                           double alpha,
                           double beta,
                           struct CmxModel **out);

/**
 * Build the dimer slice chain with edge weights `a1`, `a2`.
 *
 * # Safety
 * `out` must be a valid location to store the new handle.
 */
int32_t cmx_model_new_dimer(uint32_t n, uint32_t k, double a1, double a2, struct CmxModel **out);

/**
 * Release a handle created by one of the `cmx_model_new_*` functions.
 * Passing null is a no-op.
 *
 * # Safety
 * `model` must be a handle returned by this library that has not already
 * been freed.
 */
void cmx_model_free(struct CmxModel *model);

/**
 * Circle size of the chain; 0 when the handle is null.
 *
 * # Safety
 * `model` must be a live handle from this library or null.
 */
uint32_t cmx_model_n(const struct CmxModel *model);

/**
 * Particle count of the chain; 0 when the handle is null.
 *
 * # Safety
 * `model` must be a live handle from this library or null.
 */
uint32_t cmx_model_k(const struct CmxModel *model);

/**
 * Spectral gap of the chain: writes the exact value 1 − |λ_{I₁}| and its
 * first-order sine formula.
 *
 * # Safety
 * `model` must be a live handle; `gamma_exact` and `gamma_formula` must be
 * valid writable locations.
 */
int32_t cmx_gap(const struct CmxModel *model, double *gamma_exact, double *gamma_formula);

/**
 * Exact total-variation mixing curve from the ground start: writes
 * `t_max + 1` values (times 0..=t_max) into `tv_out`.
 *
 * # Safety
 * `model` must be a live handle; `tv_out` must point to at least
 * `t_max + 1` writable doubles.
 */
int32_t cmx_mixing_curve(const struct CmxModel *model, uint64_t t_max, double *tv_out);

/**
 * Simulate `steps` transitions from the ground start under a fixed seed:
 * writes `(steps + 1) * k` positions into `positions_out`, row-major with
 * one configuration (largest position first) per time.
 *
 * # Safety
 * `model` must be a live handle; `positions_out` must point to at least
 * `(steps + 1) * k` writable u32 values.
 */
int32_t cmx_sample_trajectory(const struct CmxModel *model,
                              uint64_t seed,
                              uint64_t steps,
                              uint32_t *positions_out);

/**
 * Compute the per-orbit spectrum and write it as a checksummed CSV (plus a
 * JSON sidecar) at `path`.
 *
 * # Safety
 * `model` must be a live handle; `path` must be a NUL-terminated UTF-8
 * string.
 */
int32_t cmx_spectrum_write_csv(const struct CmxModel *model, const char *path);

/**
 * Audit the standing assumptions of the chain's step law and return the
 * result as a JSON string. The string must be released with
 * [`cmx_string_free`].
 *
 * # Safety
 * `model` must be a live handle; `out` must be a valid location to store
 * the new string.
 */
int32_t cmx_audit_json(const struct CmxModel *model, char **out);

/**
 * Release a string returned by [`cmx_audit_json`]. Passing null is a
 * no-op.
 *
 * # Safety
 * `text` must be a string returned by this library that has not already
 * been freed.
 */
void cmx_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLEMIX_H */
