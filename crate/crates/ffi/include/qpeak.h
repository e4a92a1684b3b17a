#ifndef QPEAK_H
#define QPEAK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QpStatus {
  QP_STATUS_OK = 0,
  QP_STATUS_NULL_POINTER = 1,
  QP_STATUS_INVALID_ARGUMENT = 2,
  QP_STATUS_CAPACITY = 3,
  QP_STATUS_IO = 4,
  QP_STATUS_PARSE = 5,
  QP_STATUS_EMPTY_SHOTS = 6,
  QP_STATUS_BUFFER_TOO_SMALL = 7,
  QP_STATUS_PANIC = 99,
} QpStatus;

// Opaque diagonal observable handle.
typedef struct QpObservable QpObservable;

// Opaque statevector handle.
typedef struct QpState QpState;

// Sector diagnostics. The `*_se` fields are standard errors for shot-based
// estimates and zero for exact ones.
typedef struct QpSectorEstimates {
  double pi_up;
  double pi_down;
  double w_up;
  double w_down;
  double c_e;
  double a_avg;
  uint64_t n_shots;
  double pi_up_se;
  double pi_down_se;
  double w_up_se;
  double w_down_se;
  double c_e_se;
  double a_avg_se;
} QpSectorEstimates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qp_version(void);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into the library from the same thread.
const char *qp_last_error(void);

// `|0...0>` on `num_qubits` qubits.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QpStatus qp_state_zero(uint32_t num_qubits, struct QpState **out);

// Prepares draw `draw_index` of the ensemble described by `spec_json`.
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be writable.
enum QpStatus qp_state_from_ensemble_json(const char *spec_json,
                                          uint64_t draw_index,
                                          uint64_t master_seed,
                                          struct QpState **out);

// Releases a state handle; null is ignored.
//
// # Safety
// `state` must come from this library and not be used afterwards.
void qp_state_free(struct QpState *state);

// Qubit count, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
uint32_t qp_state_num_qubits(const struct QpState *state);

// Copies the `2^n` basis weights into `out` (capacity `len`).
//
// # Safety
// `out` must point to at least `len` writable doubles.
enum QpStatus qp_state_basis_weights(const struct QpState *state, double *out, uintptr_t len);

// Draws `n_shots` basis indices into `out` (capacity `len`).
//
// # Safety
// `out` must point to at least `len` writable integers.
enum QpStatus qp_state_sample_shots(const struct QpState *state,
                                    uintptr_t n_shots,
                                    uint64_t seed,
                                    uint64_t *out,
                                    uintptr_t len);

// Builds an observable from its JSON description (`{"terms": [...]}`).
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be writable.
enum QpStatus qp_observable_from_json(const char *spec_json,
                                      uint32_t num_qubits,
                                      struct QpObservable **out);

// Unit-coefficient Z-string on `support`.
//
// # Safety
// `support` must point to `len` integers; `out` must be writable.
enum QpStatus qp_observable_z_string(uint32_t num_qubits,
                                     const uint32_t *support,
                                     uintptr_t len,
                                     struct QpObservable **out);

// Releases an observable handle; null is ignored.
//
// # Safety
// `obs` must come from this library and not be used afterwards.
void qp_observable_free(struct QpObservable *obs);

// Diagonal element `a_z`.
//
// # Safety
// `obs` must be a live handle and `out` writable.
enum QpStatus qp_observable_eval(const struct QpObservable *obs, uint64_t z, double *out);

// Exact sector diagnostics of `state`.
//
// # Safety
// Handles must be live; `rule_qubits` must point to `rule_len` integers.
enum QpStatus qp_exact_sector_estimates(const struct QpState *state,
                                        const struct QpObservable *obs,
                                        const uint32_t *rule_qubits,
                                        uintptr_t rule_len,
                                        struct QpSectorEstimates *out);

// Shot-based sector estimates from measured basis indices.
//
// # Safety
// `shots` must point to `n_shots` integers; other pointers as above.
enum QpStatus qp_shot_sector_estimates(const uint64_t *shots,
                                       uintptr_t n_shots,
                                       const struct QpObservable *obs,
                                       const uint32_t *rule_qubits,
                                       uintptr_t rule_len,
                                       struct QpSectorEstimates *out);

// Top-K masses `M(K)` for each of the `len` values in `ks`, written to `out`.
//
// # Safety
// `ks` and `out` must each point to `len` elements.
enum QpStatus qp_concentration(const struct QpState *state,
                               const uint64_t *ks,
                               uintptr_t len,
                               double *out);

// Good-set fraction whose ideal mass peaks after `iterations` rounds.
//
// # Safety
// `out` must be writable.
enum QpStatus qp_f_target(uint32_t iterations, double *out);

// Ideal good-set mass after `iterations` rounds at good-set fraction `f`.
//
// # Safety
// `out` must be writable.
enum QpStatus qp_p_g_ideal(uint32_t iterations, double f, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPEAK_H */
