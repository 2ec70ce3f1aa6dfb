/* bedsim — blanket-manipulation simulation toolkit, public C interface.
 *
 * All functions return a bedsim_status; on failure, bedsim_last_error()
 * describes the most recent error on the calling thread. Opaque handles must
 * be released with their matching destroy function. Output pointers may be
 * NULL when the caller does not need that output (unless noted otherwise).
 */
#ifndef BEDSIM_BEDSIM_H
#define BEDSIM_BEDSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bedsim_status {
    BEDSIM_OK = 0,
    BEDSIM_ERR_INVALID_ARGUMENT = 1,
    BEDSIM_ERR_INVALID_STATE = 2,
    BEDSIM_ERR_IO = 3,
    BEDSIM_ERR_RESET_FAILED = 4,
    BEDSIM_ERR_INTERNAL = 5
} bedsim_status;

/* Message for the last failing call on this thread ("" if none). The pointer
 * stays valid until the next failing bedsim call on the same thread. */
const char* bedsim_last_error(void);

const char* bedsim_version(void);

/* ---- environment ------------------------------------------------------- */

typedef struct bedsim_env bedsim_env;

/* config_json: a run-config document (see docs/config.md); NULL or "" uses
 * defaults. The env is built from its "target" and "env" sections. */
bedsim_status bedsim_env_create(const char* config_json, bedsim_env** out_env);
void bedsim_env_destroy(bedsim_env* env);

/* Sample a pose + blanket until the reset contract holds; writes the
 * 12-number observation. */
bedsim_status bedsim_env_reset(bedsim_env* env, uint64_t seed,
                               double out_observation[12]);

/* Run one grasp/lift/drag/release episode from the current reset snapshot.
 * action = (grasp_x, grasp_y, release_x, release_y) meters in bed frame.
 * out_reward_terms = (target, nontarget, head, distance) components.
 * out_counts = (rho_t, rho_n, rho_h, n_t, n_n, n_h).
 * out_flags = (clamped, settled) as 0/1. */
bedsim_status bedsim_env_execute(bedsim_env* env, const double action[4],
                                 double* out_reward, double out_reward_terms[4],
                                 int32_t out_counts[6], int32_t out_flags[2]);

/* ---- policy models ------------------------------------------------------ */

typedef struct bedsim_model bedsim_model;

bedsim_status bedsim_model_load(const char* path, bedsim_model** out_model);
bedsim_status bedsim_model_save(const bedsim_model* model, const char* path);
void bedsim_model_destroy(bedsim_model* model);

/* deterministic != 0: squashed policy mean. deterministic == 0: one Gaussian
 * sample seeded by noise_seed. Actions always lie inside the action box. */
bedsim_status bedsim_model_act(const bedsim_model* model,
                               const double observation[12], int deterministic,
                               uint64_t noise_seed, double out_action[4]);

/* ---- whole-command runs (the CLI is a thin wrapper over these) ----------- */

/* Each takes a full run-config JSON document; unknown keys are rejected.
 * collect: mine a dataset (CMA-ES per pose), filter it, write dataset_path.
 * train:   train_mode "supervised" (needs dataset_path) or "ppo"; writes
 *          model_path.
 * eval:    evaluate model_path over targets x conditions; writes results_csv
 *          and results_md, and an episode log when episode_log is set.
 * replay:  re-run record episode_index of episode_log; writes per-frame JSON
 *          into frames_dir. */
bedsim_status bedsim_run_collect(const char* config_json);
bedsim_status bedsim_run_train(const char* config_json);
bedsim_status bedsim_run_eval(const char* config_json);
bedsim_status bedsim_run_replay(const char* config_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BEDSIM_BEDSIM_H */
