/* C interface to the stark-lft Stark-effect solver. */

#ifndef STARK_LFT_H
#define STARK_LFT_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes mirrored from the library error kinds.
 */
typedef enum StarkStatus {
  StarkOk = 0,
  StarkInvalidArgument = 1,
  StarkConfigError = 2,
  StarkDomainError = 3,
  StarkConvergenceError = 4,
  StarkLinalgError = 5,
  StarkUnsupported = 6,
  StarkIoError = 7,
  StarkInternalError = 8,
} StarkStatus;

/**
 * Opaque parsed configuration.
 */
typedef struct StarkConfig StarkConfig;

/**
 * Opaque per-energy scattering solution (channels, frame transformation,
 * eta phases, dipole vectors).
 */
typedef struct StarkSolution StarkSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message (UTF-8, NUL-terminated, truncated to
 * `len`).  Returns the full message length.
 */
uintptr_t stark_last_error(char *buf, uintptr_t len);

/**
 * Parse a JSON configuration document.  On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
enum StarkStatus stark_config_parse(const char *json, struct StarkConfig **out);

/**
 * # Safety
 * `cfg` must come from `stark_config_parse` and not be freed twice.
 */
void stark_config_free(struct StarkConfig *cfg);

/**
 * Execute the configured mode, writing CSV artifacts into `out_dir`.
 *
 * # Safety
 * `cfg` must be a live handle; `out_dir` a valid NUL-terminated path.
 */
enum StarkStatus stark_run(const struct StarkConfig *cfg, const char *out_dir, int threads);

/**
 * Solve the scattering chain for one scan energy (`energy_index` into the
 * config's energy list).  On success `*out` owns a new handle.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum StarkStatus stark_solve(const struct StarkConfig *cfg,
                             uintptr_t energy_index,
                             struct StarkSolution **out);

/**
 * # Safety
 * `sol` must come from `stark_solve` and not be freed twice.
 */
void stark_solution_free(struct StarkSolution *sol);

/**
 * Number of retained outgoing channels.
 *
 * # Safety
 * `sol` must be a live handle.
 */
uintptr_t stark_solution_channel_count(const struct StarkSolution *sol);

/**
 * Separation constant beta of retained channel `i`.
 *
 * # Safety
 * `sol` must be a live handle; `out` writable.
 */
enum StarkStatus stark_solution_beta(const struct StarkSolution *sol, uintptr_t i, double *out);

/**
 * Incoming-wave dipole amplitude D^- of retained channel `i`.
 *
 * # Safety
 * `sol` must be a live handle; `re`/`im` writable.
 */
enum StarkStatus stark_solution_dipole(const struct StarkSolution *sol,
                                       uintptr_t i,
                                       double *re,
                                       double *im);

/**
 * Total photoionization cross section (atomic units) at the configured
 * photon energy.
 *
 * # Safety
 * `sol` must be a live handle; `out` writable.
 */
enum StarkStatus stark_solution_sigma_total(const struct StarkSolution *sol, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STARK_LFT_H */
