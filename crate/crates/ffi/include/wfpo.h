#ifndef WFPO_H
#define WFPO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum WfpoStatus {
  WFPO_STATUS_OK = 0,
  WFPO_STATUS_NULL_POINTER = 1,
  WFPO_STATUS_INVALID_ARGUMENT = 2,
  WFPO_STATUS_NUMERICAL_FAILURE = 3,
  WFPO_STATUS_PANIC = 4,
} WfpoStatus;

// Propagation frame for [`wfpo_simulate`].
typedef enum WfpoFrame {
  WFPO_FRAME_ROTATING = 0,
  // Keeps the optical carrier of the pulse.
  WFPO_FRAME_LAB = 1,
} WfpoFrame;

// Validated system model.
typedef struct WfpoModel WfpoModel;

// Complex correlation trace on a lag grid.
typedef struct WfpoTrace WfpoTrace;

// Stored states of one propagation.
typedef struct WfpoTrajectory WfpoTrajectory;

typedef struct WfpoModelParams {
  double omega_g;
  double omega_e;
  double detuning;
  double mu;
  double gamma;
  double f14;
  double f23;
  double f24;
  double f13;
} WfpoModelParams;

// Discretization. Zero `rk4_step` or `freq_points` selects the default.
typedef struct WfpoGridParams {
  double window;
  double rk4_step;
  size_t stride;
  double freq_half_width;
  size_t freq_points;
} WfpoGridParams;

typedef struct WfpoPulseParams {
  double bandwidth;
  double chirp;
  double carrier;
} WfpoPulseParams;

typedef struct WfpoChirpEffect {
  double dn_pos;
  double dn_neg;
  double effect;
} WfpoChirpEffect;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call on the same thread.
const char *wfpo_last_error_message(void);

// # Safety
// `out` must be null or point to writable memory for one struct.
enum WfpoStatus wfpo_model_params_table1(struct WfpoModelParams *out);

// # Safety
// `out` must be null or point to writable memory for one struct.
enum WfpoStatus wfpo_grid_params_default(struct WfpoGridParams *out);

// # Safety
// `params` must be null or valid; `out` must be null or writable.
enum WfpoStatus wfpo_model_new(const struct WfpoModelParams *params, struct WfpoModel **out);

// # Safety
// `model` must be null or come from [`wfpo_model_new`] and not be freed yet.
void wfpo_model_free(struct WfpoModel *model);

// Propagates from the ground state |1⟩⟨1|.
//
// # Safety
// Pointers must be null or valid; `out` receives a new trajectory handle.
enum WfpoStatus wfpo_simulate(const struct WfpoModel *model,
                              const struct WfpoPulseParams *pulse,
                              const struct WfpoGridParams *grids,
                              enum WfpoFrame frame,
                              struct WfpoTrajectory **out);

// # Safety
// `traj` must be null or a live trajectory handle.
enum WfpoStatus wfpo_trajectory_len(const struct WfpoTrajectory *traj, size_t *out);

// Copies the stored times and the four level populations (row-major,
// levels 1..4 per time) into caller buffers of `len` and `4 * len`
// doubles. Either buffer may be null to skip it.
//
// # Safety
// Non-null buffers must hold the stated number of doubles.
enum WfpoStatus wfpo_trajectory_copy(const struct WfpoTrajectory *traj,
                                     double *times,
                                     double *populations,
                                     size_t len);

// Final population of `target`: 0 for the excited surface, k for level k.
//
// # Safety
// `traj` must be null or live; `out` null or writable.
enum WfpoStatus wfpo_trajectory_final_population(const struct WfpoTrajectory *traj,
                                                 uint32_t target,
                                                 double *out);

// # Safety
// `traj` must be null or come from [`wfpo_simulate`] and not be freed yet.
void wfpo_trajectory_free(struct WfpoTrajectory *traj);

// Autocorrelation C(τ) of the pulse's analytic field.
//
// # Safety
// Pointers must be null or valid; `out` receives a new trace handle.
enum WfpoStatus wfpo_pulse_acf(const struct WfpoPulseParams *pulse,
                               const struct WfpoGridParams *grids,
                               struct WfpoTrace **out);

// # Safety
// `trace` must be null or a live trace handle.
enum WfpoStatus wfpo_trace_len(const struct WfpoTrace *trace, size_t *out);

// Copies lags and the real and imaginary parts into buffers of `len`
// doubles. Any buffer may be null to skip it.
//
// # Safety
// Non-null buffers must hold `len` doubles.
enum WfpoStatus wfpo_trace_copy(const struct WfpoTrace *trace,
                                double *lags,
                                double *re,
                                double *im,
                                size_t len);

// # Safety
// `trace` must be null or come from [`wfpo_pulse_acf`] and not be freed yet.
void wfpo_trace_free(struct WfpoTrace *trace);

// Leading-order excited-surface transfer from the pulse's ACF, starting
// in |1⟩.
//
// # Safety
// Pointers must be null or valid.
enum WfpoStatus wfpo_delta_n_lgks(const struct WfpoModel *model,
                                  const struct WfpoPulseParams *pulse,
                                  const struct WfpoGridParams *grids,
                                  double *out);

// Transfers into `target` for +|χ| and −|χ| of the pulse and their
// difference.
//
// # Safety
// Pointers must be null or valid.
enum WfpoStatus wfpo_chirp_effect(const struct WfpoModel *model,
                                  const struct WfpoPulseParams *pulse,
                                  const struct WfpoGridParams *grids,
                                  uint32_t target,
                                  struct WfpoChirpEffect *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WFPO_H */
