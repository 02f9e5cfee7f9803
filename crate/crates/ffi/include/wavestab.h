#ifndef WAVESTAB_H
#define WAVESTAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_DOMAIN = 2,
  WS_STATUS_INVALID = 3,
  WS_STATUS_NEWTON_DIVERGED = 4,
  WS_STATUS_SINGULAR = 5,
  WS_STATUS_EIGEN_FAILURE = 6,
  WS_STATUS_BLOW_UP = 7,
  WS_STATUS_IO = 8,
  WS_STATUS_BUFFER_TOO_SMALL = 9,
  WS_STATUS_PANIC = 10,
} WsStatus;

typedef enum WsVerdict {
  WS_VERDICT_STABLE_BY_DET_CRITERION = 0,
  WS_VERDICT_STABLE_BY_M_OMEGA_NONNEG_BRANCH = 1,
  WS_VERDICT_INCONCLUSIVE = 2,
} WsVerdict;

/**
 * Travelling wave: profile with its speed and integration constant.
 */
typedef struct WsWave WsWave;

/**
 * `K(k)`, `E(k)`, `K(k')`, `E(k')`.
 */
typedef struct WsEllipticPair {
  double k;
  double big_k;
  double big_e;
  double big_k_prime;
  double big_e_prime;
} WsEllipticPair;

/**
 * Branch solution of the period constraint.
 */
typedef struct WsKlPoint {
  double k;
  double l1;
  double period;
  double residual;
  double p_value;
} WsKlPoint;

typedef struct WsSpectrumSummary {
  size_t truncation;
  size_t n_neg;
  size_t n_zero;
  size_t n_pos;
  double lowest;
  double tol_zero;
  double kernel_corr;
  double gap;
  /**
   * 1 when exactly one negative and one zero eigenvalue, kernel along ψ′.
   */
  int32_t assumption_h;
} WsSpectrumSummary;

typedef struct WsStabilitySummary {
  enum WsVerdict verdict;
  double m;
  double f;
  double m_omega;
  double m_a;
  double f_omega;
  double f_a;
  double det_d;
  double i;
  double avg_minus_speed;
  size_t n_neg;
  size_t n_zero;
  double kernel_corr;
} WsStabilitySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length of the last error message on this thread, without the
 * terminating nul; 0 if the last call succeeded.
 */
size_t ws_last_error_length(void);

/**
 * Copies the last error message (nul-terminated) into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum WsStatus ws_last_error_message(char *buf, size_t len);

/**
 * Complete elliptic integrals at modulus `k ∈ [0, 1)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_complete_integrals(double k, struct WsEllipticPair *out_pair);

/**
 * Jacobi `dn(u, k)`.
 *
 * # Safety
 * `out_value` must be valid for writes.
 */
enum WsStatus ws_dn(double u, double k, double *out_value);

/**
 * Branch root of the period constraint at `k`.
 *
 * # Safety
 * `out_point` must be valid for writes.
 */
enum WsStatus ws_kl_solve(double k, struct WsKlPoint *out_point);

/**
 * `p(k, L²)`, whose sign is that of `M/L − ω`.
 *
 * # Safety
 * `out_value` must be valid for writes.
 */
enum WsStatus ws_p_of_k(double k, double period, double *out_value);

/**
 * Dnoidal wave of modulus `k` on the branch at speed `omega`, truncated at
 * `truncation` modes. Free with [`ws_wave_free`].
 *
 * # Safety
 * `out_wave` must be valid for writes.
 */
enum WsStatus ws_wave_new_dnoidal(double k,
                                  double omega,
                                  size_t truncation,
                                  struct WsWave **out_wave);

/**
 * Releases a wave; null is ignored.
 *
 * # Safety
 * `w` must come from [`ws_wave_new_dnoidal`] and not be used afterwards.
 */
void ws_wave_free(struct WsWave *w);

/**
 * Number of stored coefficients, `N + 1`; 0 for null.
 *
 * # Safety
 * `w` must be null or a live wave.
 */
size_t ws_wave_len(const struct WsWave *w);

/**
 * Period, speed and integration constant.
 *
 * # Safety
 * `w` must be a live wave; out-pointers may be null to skip.
 */
enum WsStatus ws_wave_params(const struct WsWave *w,
                             double *period,
                             double *omega,
                             double *a_const);

/**
 * Copies the cosine coefficients `c₀..c_N` into `buf`.
 *
 * # Safety
 * `w` must be a live wave and `buf` must hold `len` doubles.
 */
enum WsStatus ws_wave_coeffs(const struct WsWave *w, double *buf, size_t len);

/**
 * `ψ(x)` from the truncated series.
 *
 * # Safety
 * `w` must be a live wave, `out_value` valid for writes.
 */
enum WsStatus ws_wave_eval(const struct WsWave *w, double x, double *out_value);

/**
 * Spectrum of the linearized operator at the wave's own truncation.
 *
 * # Safety
 * `w` must be a live wave, `out_summary` valid for writes.
 */
enum WsStatus ws_spectrum_summary(const struct WsWave *w, struct WsSpectrumSummary *out_summary);

/**
 * Stability criteria at the wave.
 *
 * # Safety
 * `w` must be a live wave, `out_summary` valid for writes.
 */
enum WsStatus ws_stability_report(const struct WsWave *w, struct WsStabilitySummary *out_summary);

/**
 * Full report as nul-terminated JSON. `needed` receives the size including
 * the nul; with a short or null `buf` the call returns `BufferTooSmall`.
 *
 * # Safety
 * `w` must be a live wave, `buf` null or `len` writable bytes, `needed`
 * null or valid for writes.
 */
enum WsStatus ws_stability_report_json(const struct WsWave *w,
                                       char *buf,
                                       size_t len,
                                       size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVESTAB_H */
