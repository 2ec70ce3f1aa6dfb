#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env/env.hpp"

namespace bedsim {

// One config document per run, shared by every command; the CLI merges a
// config file with flag overrides (flags win) and hands the merged JSON to the
// library. Unknown keys are rejected at every nesting level.
struct RunConfig {
    int schema_version = 1;
    std::uint64_t seed = 0;
    int workers = 1;  // bound on concurrent episodes; results independent of it
    std::string target = "upper_body";

    EnvConfig env;  // environment + physics constants

    // collect
    int collect_rollouts = 5000;
    int per_pose_cap = 300;
    double advance_reward = 95.0;
    double cma_sigma0 = 0.3;
    int cma_lambda = 8;
    double filter_threshold = 90.0;

    // train
    std::string train_mode = "supervised";  // or "ppo"
    int epochs = 100;
    int batch_size = 8;
    double learning_rate = 1e-3;
    int ppo_rollouts = 5000;
    int ppo_batch_rollouts = 32;
    int ppo_sgd_updates = 50;
    double ppo_sgd_lr = 5e-5;
    double ppo_clip_eps = 0.2;
    double ppo_value_coeff = 0.5;

    // eval
    int trials = 100;
    std::vector<std::string> targets;                    // empty -> {target}
    std::vector<std::string> conditions = {"original"};

    // replay
    int episode_index = 0;

    // paths
    std::string dataset_path;
    std::string model_path;
    std::string results_csv;
    std::string results_md;
    std::string episode_log;
    std::string frames_dir;
};

// Parse from a JSON document (text). Throws InvalidArgument on unknown keys,
// wrong types, bad enum values, or a schema_version mismatch.
RunConfig parseRunConfig(const std::string& json_text);
RunConfig loadRunConfigFile(const std::string& path);

// Shallow-merge two JSON documents: scalar/array values in `overrides` replace
// those in `base`; nested objects merge recursively. Used for
// flags-over-file-over-defaults precedence.
std::string mergeConfigJson(const std::string& base, const std::string& overrides);

// Serialize back to JSON (full document including defaults); parse(serialize(c))
// round-trips every field.
std::string runConfigToJson(const RunConfig& cfg);

}  // namespace bedsim
