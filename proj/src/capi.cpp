#include "bedsim/bedsim.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "config/run_config.hpp"
#include "core/error.hpp"
#include "env/env.hpp"
#include "env/rollout.hpp"
#include "eval/harness.hpp"
#include "io/formats.hpp"
#include "optim/collect.hpp"
#include "policy/mlp.hpp"
#include "policy/train.hpp"

namespace {

thread_local std::string g_last_error;

bedsim_status statusFromCode(bedsim::ErrorCode code) {
    using bedsim::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return BEDSIM_ERR_INVALID_ARGUMENT;
        case ErrorCode::InvalidState: return BEDSIM_ERR_INVALID_STATE;
        case ErrorCode::Io: return BEDSIM_ERR_IO;
        case ErrorCode::ResetFailed: return BEDSIM_ERR_RESET_FAILED;
        case ErrorCode::Internal: return BEDSIM_ERR_INTERNAL;
    }
    return BEDSIM_ERR_INTERNAL;
}

template <typename Fn>
bedsim_status guarded(Fn&& fn) {
    try {
        fn();
        return BEDSIM_OK;
    } catch (const bedsim::Error& e) {
        g_last_error = e.what();
        return statusFromCode(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BEDSIM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return BEDSIM_ERR_INTERNAL;
    }
}

bedsim::RunConfig configFromJson(const char* config_json) {
    if (config_json == nullptr || config_json[0] == '\0')
        return bedsim::RunConfig{};
    return bedsim::parseRunConfig(config_json);
}

}  // namespace

struct bedsim_env {
    bedsim::Env env;
};

struct bedsim_model {
    bedsim::PolicyModel model;
};

extern "C" {

const char* bedsim_last_error(void) { return g_last_error.c_str(); }

const char* bedsim_version(void) { return "1.0.0"; }

bedsim_status bedsim_env_create(const char* config_json, bedsim_env** out_env) {
    return guarded([&] {
        bedsim::requireArg(out_env != nullptr, "out_env must not be NULL");
        bedsim::RunConfig cfg = configFromJson(config_json);
        *out_env = new bedsim_env{bedsim::Env(cfg.env)};
    });
}

void bedsim_env_destroy(bedsim_env* env) { delete env; }

bedsim_status bedsim_env_reset(bedsim_env* env, uint64_t seed,
                               double out_observation[12]) {
    return guarded([&] {
        bedsim::requireArg(env != nullptr, "env must not be NULL");
        const bedsim::EnvState& state = env->env.reset(seed);
        if (out_observation)
            for (int i = 0; i < 12; ++i) out_observation[i] = state.observation[i];
    });
}

bedsim_status bedsim_env_execute(bedsim_env* env, const double action[4],
                                 double* out_reward, double out_reward_terms[4],
                                 int32_t out_counts[6], int32_t out_flags[2]) {
    return guarded([&] {
        bedsim::requireArg(env != nullptr, "env must not be NULL");
        bedsim::requireArg(action != nullptr, "action must not be NULL");
        bedsim::Action a{action[0], action[1], action[2], action[3]};
        bedsim::EpisodeOutcome out = env->env.execute(a);
        if (out_reward) *out_reward = out.reward.total;
        if (out_reward_terms) {
            out_reward_terms[0] = out.reward.r_target;
            out_reward_terms[1] = out.reward.r_nontarget;
            out_reward_terms[2] = out.reward.r_head;
            out_reward_terms[3] = out.reward.r_distance;
        }
        if (out_counts) {
            out_counts[0] = out.report.rho_t;
            out_counts[1] = out.report.rho_n;
            out_counts[2] = out.report.rho_h;
            out_counts[3] = out.report.n_t;
            out_counts[4] = out.report.n_n;
            out_counts[5] = out.report.n_h;
        }
        if (out_flags) {
            out_flags[0] = out.clamped ? 1 : 0;
            out_flags[1] = out.settled ? 1 : 0;
        }
    });
}

bedsim_status bedsim_model_load(const char* path, bedsim_model** out_model) {
    return guarded([&] {
        bedsim::requireArg(path != nullptr && out_model != nullptr,
                           "path and out_model must not be NULL");
        *out_model = new bedsim_model{bedsim::loadModel(path)};
    });
}

bedsim_status bedsim_model_save(const bedsim_model* model, const char* path) {
    return guarded([&] {
        bedsim::requireArg(model != nullptr && path != nullptr,
                           "model and path must not be NULL");
        bedsim::saveModel(model->model, path);
    });
}

void bedsim_model_destroy(bedsim_model* model) { delete model; }

bedsim_status bedsim_model_act(const bedsim_model* model, const double observation[12],
                               int deterministic, uint64_t noise_seed,
                               double out_action[4]) {
    return guarded([&] {
        bedsim::requireArg(model != nullptr && observation != nullptr &&
                               out_action != nullptr,
                           "model, observation, and out_action must not be NULL");
        bedsim::Observation obs;
        for (int i = 0; i < 12; ++i) obs.values[i] = observation[i];
        bedsim::Rng rng(noise_seed);
        bedsim::Action a = bedsim::act(model->model, obs, deterministic != 0, rng);
        auto arr = a.asArray();
        for (int i = 0; i < 4; ++i) out_action[i] = arr[i];
    });
}

bedsim_status bedsim_run_collect(const char* config_json) {
    return guarded([&] {
        bedsim::RunConfig cfg = configFromJson(config_json);
        bedsim::requireArg(!cfg.dataset_path.empty(),
                           "collect needs dataset_path");
        bedsim::CollectConfig cc;
        cc.target = cfg.target;
        cc.total_rollouts = cfg.collect_rollouts;
        cc.per_pose_cap = cfg.per_pose_cap;
        cc.advance_reward = cfg.advance_reward;
        cc.sigma0 = cfg.cma_sigma0;
        cc.lambda = cfg.cma_lambda;
        cc.seed = cfg.seed;
        bedsim::Dataset ds =
            bedsim::collectDataset(bedsim::simEnvFactory(cfg.env), cc);
        bedsim::Dataset kept = bedsim::filterDataset(ds, cfg.filter_threshold);
        bedsim::writeDatasetCsv(kept, cfg.dataset_path);
    });
}

bedsim_status bedsim_run_train(const char* config_json) {
    return guarded([&] {
        bedsim::RunConfig cfg = configFromJson(config_json);
        bedsim::requireArg(!cfg.model_path.empty(), "train needs model_path");
        if (cfg.train_mode == "supervised") {
            bedsim::requireArg(!cfg.dataset_path.empty(),
                               "supervised training needs dataset_path");
            bedsim::Dataset ds = bedsim::readDatasetCsv(cfg.dataset_path);
            bedsim::TrainConfig tc;
            tc.epochs = cfg.epochs;
            tc.batch_size = cfg.batch_size;
            tc.learning_rate = cfg.learning_rate;
            tc.seed = cfg.seed;
            bedsim::SupervisedResult res = bedsim::trainSupervised(ds, tc);
            bedsim::saveModel(res.model, cfg.model_path);
        } else {
            bedsim::PpoConfig pc;
            pc.total_rollouts = cfg.ppo_rollouts;
            pc.batch_rollouts = cfg.ppo_batch_rollouts;
            pc.sgd_updates = cfg.ppo_sgd_updates;
            pc.sgd_lr = cfg.ppo_sgd_lr;
            pc.clip_eps = cfg.ppo_clip_eps;
            pc.value_coeff = cfg.ppo_value_coeff;
            pc.seed = cfg.seed;
            bedsim::PpoResult res =
                bedsim::ppoTrain(bedsim::simEnvFactory(cfg.env), pc);
            bedsim::saveModel(res.model, cfg.model_path);
        }
    });
}

bedsim_status bedsim_run_eval(const char* config_json) {
    return guarded([&] {
        bedsim::RunConfig cfg = configFromJson(config_json);
        bedsim::requireArg(!cfg.model_path.empty(), "eval needs model_path");
        bedsim::requireArg(!cfg.results_csv.empty() && !cfg.results_md.empty(),
                           "eval needs results_csv and results_md");
        bedsim::PolicyModel model = bedsim::loadModel(cfg.model_path);

        std::vector<bedsim::TargetName> targets;
        if (cfg.targets.empty())
            targets.push_back(bedsim::parseTarget(cfg.target));
        else
            for (const std::string& t : cfg.targets)
                targets.push_back(bedsim::parseTarget(t));
        std::vector<bedsim::Condition> conditions;
        for (const std::string& c : cfg.conditions)
            conditions.push_back(bedsim::parseCondition(c));

        // the episode log captures the first target/condition cell, so replays
        // of its records can rebuild the same environment from this config
        std::vector<bedsim::EpisodeRecord> log;
        std::vector<bedsim::ComparisonRow> table;
        std::uint64_t cell = 0;
        for (bedsim::TargetName target : targets) {
            for (bedsim::Condition condition : conditions) {
                bedsim::EnvConfig env_cfg = bedsim::applyCondition(cfg.env, condition);
                env_cfg.target = target;
                bedsim::EpisodeCallback cb;
                if (!cfg.episode_log.empty() && cell == 0) {
                    cb = [&](std::uint64_t seed, const bedsim::Observation& obs,
                             const bedsim::Action& requested,
                             const bedsim::EpisodeOutcome& outcome) {
                        log.push_back(bedsim::makeEpisodeRecord(seed, target, obs,
                                                                requested, outcome));
                    };
                }
                bedsim::ComparisonRow row{target, condition, {}};
                row.metrics = bedsim::evaluate(
                    model, env_cfg, cfg.trials,
                    bedsim::Rng::deriveSeed(cfg.seed, 700000 + cell), cb);
                table.push_back(std::move(row));
                ++cell;
            }
        }
        bedsim::writeResults(table, cfg.results_csv, cfg.results_md);
        if (!cfg.episode_log.empty()) bedsim::writeEpisodeLog(log, cfg.episode_log);
    });
}

bedsim_status bedsim_run_replay(const char* config_json) {
    return guarded([&] {
        bedsim::RunConfig cfg = configFromJson(config_json);
        bedsim::requireArg(!cfg.episode_log.empty(), "replay needs episode_log");
        bedsim::requireArg(!cfg.frames_dir.empty(), "replay needs frames_dir");
        std::vector<bedsim::EpisodeRecord> log =
            bedsim::readEpisodeLog(cfg.episode_log);
        bedsim::requireArg(cfg.episode_index >= 0 &&
                               cfg.episode_index < int(log.size()),
                           "episode_index out of range");
        const bedsim::EpisodeRecord& rec = log[cfg.episode_index];

        bedsim::EnvConfig env_cfg = bedsim::applyCondition(
            cfg.env, bedsim::parseCondition(cfg.conditions.front()));
        env_cfg.target = bedsim::parseTarget(rec.target);
        bedsim::Env env(env_cfg);
        env.reset(rec.seed);

        std::filesystem::create_directories(cfg.frames_dir);
        int frame_id = 0;
        auto framePath = [&] {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%06d.json", frame_id++);
            return (std::filesystem::path(cfg.frames_dir) / name).string();
        };
        bedsim::writeFrameFile(env.state().cloth, framePath());

        // one frame every 25 physics steps (8 ms of export per simulated
        // second at dt = 5 ms) keeps replays viewable without huge output
        int step_count = 0;
        bedsim::FrameCallback on_frame = [&](const bedsim::ClothMesh& mesh) {
            if (++step_count % 25 == 0) bedsim::writeFrameFile(mesh, framePath());
        };
        bedsim::Action action{rec.action[0], rec.action[1], rec.action[2],
                              rec.action[3]};
        bedsim::EpisodeOutcome out = env.execute(action, on_frame);
        bedsim::require(out.reward.total == rec.reward, bedsim::ErrorCode::Internal,
                "replayed reward does not match the logged reward");
    });
}

}  // extern "C"
