// bedsim command-line front end. Thin wrapper over the public C interface:
// it merges a config file with flag overrides (flags win over the file, the
// file wins over built-in defaults) and hands the merged JSON to the library.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bedsim/bedsim.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    // optional overrides; only emitted into the merged JSON when set
    CLI::Option* seed_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* target_opt = nullptr;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string target;
};

void addCommon(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("-c,--config", f.config_path, "Run-config JSON file");
    f.seed_opt = cmd->add_option("--seed", f.seed, "Master seed");
    f.workers_opt =
        cmd->add_option("--workers", f.workers, "Bound on concurrent episodes");
    f.target_opt = cmd->add_option("--target", f.target,
                                   "Target region (e.g. upper_body)");
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// file config (or {}) overlaid with whatever flags the user actually passed
std::string mergedConfig(const CommonFlags& f, const json& extra) {
    json base = json::object();
    if (!f.config_path.empty()) {
        base = json::parse(readFile(f.config_path), nullptr, false);
        if (base.is_discarded() || !base.is_object())
            throw std::runtime_error("config file is not a JSON object: " +
                                     f.config_path);
    }
    json overrides = extra;
    if (f.seed_opt->count()) overrides["seed"] = f.seed;
    if (f.workers_opt->count()) overrides["workers"] = f.workers;
    if (f.target_opt->count()) overrides["target"] = f.target;
    for (const auto& [key, value] : overrides.items()) base[key] = value;
    return base.dump();
}

int runStatus(bedsim_status status) {
    if (status == BEDSIM_OK) return 0;
    const char* category = "internal";
    switch (status) {
        case BEDSIM_ERR_INVALID_ARGUMENT: category = "invalid-argument"; break;
        case BEDSIM_ERR_INVALID_STATE: category = "invalid-state"; break;
        case BEDSIM_ERR_IO: category = "io"; break;
        case BEDSIM_ERR_RESET_FAILED: category = "reset-failed"; break;
        default: break;
    }
    std::fprintf(stderr, "error [%s]: %s\n", category, bedsim_last_error());
    return int(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bedsim — blanket-manipulation simulation toolkit"};
    app.require_subcommand(1);

    // collect
    auto* collect = app.add_subcommand("collect", "Mine a supervised dataset");
    CommonFlags cf;
    addCommon(collect, cf);
    std::string c_out;
    int c_rollouts = 0;
    double c_threshold = 0.0;
    auto* c_out_opt = collect->add_option("-o,--output", c_out, "Dataset CSV path");
    auto* c_roll_opt =
        collect->add_option("--rollouts", c_rollouts, "Total rollout budget");
    auto* c_thr_opt = collect->add_option("--filter-threshold", c_threshold,
                                          "Keep rows with reward above this");

    // train
    auto* train = app.add_subcommand("train", "Train a policy");
    CommonFlags tf;
    addCommon(train, tf);
    std::string t_mode, t_dataset, t_model;
    int t_rollouts = 0;
    auto* t_mode_opt =
        train->add_option("--mode", t_mode, "supervised or ppo")
            ->check(CLI::IsMember({"supervised", "ppo"}));
    auto* t_ds_opt =
        train->add_option("-d,--dataset", t_dataset, "Dataset CSV (supervised)");
    auto* t_model_opt = train->add_option("-o,--output", t_model, "Model file path");
    auto* t_roll_opt =
        train->add_option("--rollouts", t_rollouts, "PPO rollout budget");
    int t_epochs = 0;
    auto* t_epochs_opt =
        train->add_option("--epochs", t_epochs, "Supervised training epochs");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a trained policy");
    CommonFlags ef;
    addCommon(eval, ef);
    std::string e_model, e_csv, e_md, e_log;
    int e_trials = 0;
    std::vector<std::string> e_conditions, e_targets;
    auto* e_model_opt = eval->add_option("-m,--model", e_model, "Model file");
    auto* e_trials_opt = eval->add_option("--trials", e_trials, "Trials per cell");
    auto* e_csv_opt = eval->add_option("--results-csv", e_csv, "Results CSV path");
    auto* e_md_opt = eval->add_option("--results-md", e_md, "Results Markdown path");
    auto* e_log_opt =
        eval->add_option("--episode-log", e_log, "Episode log path (JSON lines)");
    auto* e_cond_opt = eval->add_option(
        "--conditions", e_conditions,
        "Conditions: original, random_blanket, random_body");
    auto* e_tgt_opt =
        eval->add_option("--targets", e_targets, "Targets for a comparison table");

    // replay
    auto* replay = app.add_subcommand("replay", "Export frames for a logged episode");
    CommonFlags rf;
    addCommon(replay, rf);
    std::string r_log, r_frames;
    int r_index = 0;
    auto* r_log_opt = replay->add_option("-l,--episode-log", r_log, "Episode log");
    auto* r_idx_opt =
        replay->add_option("--episode-index", r_index, "Record index in the log");
    auto* r_dir_opt =
        replay->add_option("-o,--frames-dir", r_frames, "Output frame directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (collect->parsed()) {
            json extra = json::object();
            if (c_out_opt->count()) extra["dataset_path"] = c_out;
            if (c_roll_opt->count()) extra["collect_rollouts"] = c_rollouts;
            if (c_thr_opt->count()) extra["filter_threshold"] = c_threshold;
            return runStatus(bedsim_run_collect(mergedConfig(cf, extra).c_str()));
        }
        if (train->parsed()) {
            json extra = json::object();
            if (t_mode_opt->count()) extra["train_mode"] = t_mode;
            if (t_ds_opt->count()) extra["dataset_path"] = t_dataset;
            if (t_model_opt->count()) extra["model_path"] = t_model;
            if (t_roll_opt->count()) extra["ppo_rollouts"] = t_rollouts;
            if (t_epochs_opt->count()) extra["epochs"] = t_epochs;
            return runStatus(bedsim_run_train(mergedConfig(tf, extra).c_str()));
        }
        if (eval->parsed()) {
            json extra = json::object();
            if (e_model_opt->count()) extra["model_path"] = e_model;
            if (e_trials_opt->count()) extra["trials"] = e_trials;
            if (e_csv_opt->count()) extra["results_csv"] = e_csv;
            if (e_md_opt->count()) extra["results_md"] = e_md;
            if (e_log_opt->count()) extra["episode_log"] = e_log;
            if (e_cond_opt->count()) extra["conditions"] = e_conditions;
            if (e_tgt_opt->count()) extra["targets"] = e_targets;
            return runStatus(bedsim_run_eval(mergedConfig(ef, extra).c_str()));
        }
        if (replay->parsed()) {
            json extra = json::object();
            if (r_log_opt->count()) extra["episode_log"] = r_log;
            if (r_idx_opt->count()) extra["episode_index"] = r_index;
            if (r_dir_opt->count()) extra["frames_dir"] = r_frames;
            return runStatus(bedsim_run_replay(mergedConfig(rf, extra).c_str()));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [io]: %s\n", e.what());
        return 1;
    }
    return 0;
}
