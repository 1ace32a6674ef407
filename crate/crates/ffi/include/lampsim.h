/* C interface for the lampsim household-lighting adoption simulator. */

#ifndef LAMPSIM_H
#define LAMPSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes returned by every fallible function.
typedef enum LampsimStatus {
  LAMPSIM_STATUS_OK = 0,
  // A required pointer argument was NULL.
  LAMPSIM_STATUS_NULL_ARGUMENT = 1,
  // An argument was out of range or otherwise unusable.
  LAMPSIM_STATUS_INVALID_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  LAMPSIM_STATUS_INVALID_UTF8 = 3,
  // Configuration or scenario rejected (schema, unknown id, ranges).
  LAMPSIM_STATUS_CONFIG = 4,
  // The simulation itself failed.
  LAMPSIM_STATUS_RUNTIME = 5,
  // Writing an output file failed.
  LAMPSIM_STATUS_IO = 6,
} LampsimStatus;

// Opaque simulation configuration (agents, runs, seed, engine constants).
typedef struct LampsimConfig LampsimConfig;

// Opaque finished ensemble: per-run series plus aggregate statistics.
typedef struct LampsimEnsemble LampsimEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. Never NULL; empty
// before the first failure. Valid until the next failing call.
const char *lampsim_last_error_message(void);

// Version of the underlying simulator crate, as a static string.
const char *lampsim_version(void);

// Create a configuration with the shipped defaults (1000 agents, 50 runs,
// 240 months, seed 42). Free with `lampsim_config_free`.
struct LampsimConfig *lampsim_config_new(void);

void lampsim_config_free(struct LampsimConfig *config);

enum LampsimStatus lampsim_config_set_agents(struct LampsimConfig *config, uint32_t agents);

enum LampsimStatus lampsim_config_set_runs(struct LampsimConfig *config, uint32_t runs);

enum LampsimStatus lampsim_config_set_months(struct LampsimConfig *config, uint32_t months);

enum LampsimStatus lampsim_config_set_seed(struct LampsimConfig *config, uint64_t seed);

// Merge a JSON configuration document (the same schema as the CLI
// `--config` file) into the handle.
enum LampsimStatus lampsim_config_load_json(struct LampsimConfig *config, const char *json);

// Run an ensemble of a built-in scenario
// (`no_regulation | soft_ban | hard_ban | info_campaign | soft_ban_info`).
enum LampsimStatus lampsim_run_builtin(const struct LampsimConfig *config,
                                       const char *scenario_id,
                                       struct LampsimEnsemble **out);

// Run an ensemble of a scenario given as a JSON document (the scenario
// file schema).
enum LampsimStatus lampsim_run_scenario_json(const struct LampsimConfig *config,
                                             const char *scenario_json,
                                             struct LampsimEnsemble **out);

void lampsim_ensemble_free(struct LampsimEnsemble *ensemble);

// Number of runs in the ensemble (0 for a NULL handle).
uint32_t lampsim_ensemble_runs(const struct LampsimEnsemble *ensemble);

// Number of recorded months per run (0 for a NULL handle).
uint32_t lampsim_ensemble_months(const struct LampsimEnsemble *ensemble);

// Copy the per-month ensemble mean adoption share into `out`
// (`len >= lampsim_ensemble_months`).
enum LampsimStatus lampsim_ensemble_adoption_mean(const struct LampsimEnsemble *ensemble,
                                                  double *out,
                                                  size_t len);

// Copy the per-month adoption standard deviation across runs into `out`.
enum LampsimStatus lampsim_ensemble_adoption_std(const struct LampsimEnsemble *ensemble,
                                                 double *out,
                                                 size_t len);

// Copy one run's adoption series into `out`.
enum LampsimStatus lampsim_ensemble_run_adoption(const struct LampsimEnsemble *ensemble,
                                                 uint32_t run_index,
                                                 double *out,
                                                 size_t len);

// Ensemble mean adoption at the final recorded month.
enum LampsimStatus lampsim_ensemble_final_mean(const struct LampsimEnsemble *ensemble, double *out);

// The three run-level random factors of one run.
enum LampsimStatus lampsim_ensemble_factors(const struct LampsimEnsemble *ensemble,
                                            uint32_t run_index,
                                            double *led_price,
                                            double *incandescent_price,
                                            double *led_innovation);

// Write the ensemble as long-format CSV
// (`scenario,run,month,adoption,rep,imi,del,soc`).
enum LampsimStatus lampsim_ensemble_write_csv(const struct LampsimEnsemble *ensemble,
                                              const char *path);

// Write the JSON summary (means, stds, factors, tipping months, and the
// effective configuration).
enum LampsimStatus lampsim_ensemble_write_summary_json(const struct LampsimEnsemble *ensemble,
                                                       const char *path);

// Write the mean-adoption SVG plot with a +-1 std band.
enum LampsimStatus lampsim_ensemble_write_adoption_svg(const struct LampsimEnsemble *ensemble,
                                                       const char *path);

// Write the behavior-share SVG plot (four strategy lines).
enum LampsimStatus lampsim_ensemble_write_behaviors_svg(const struct LampsimEnsemble *ensemble,
                                                        const char *path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LAMPSIM_H */
