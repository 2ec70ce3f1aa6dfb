#include "config/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <type_traits>

#include "core/error.hpp"
#include "eval/harness.hpp"
#include "json.hpp"

namespace bedsim {

namespace {

using nlohmann::json;

json parseJson(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::InvalidArgument, "malformed JSON in " + what);
    requireArg(j.is_object(), what + " must be a JSON object");
    return j;
}

void checkKeys(const json& j, std::initializer_list<const char*> allowed,
               const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (key == k) { ok = true; break; }
        requireArg(ok, "unknown config key \"" + key + "\" in " + scope);
        (void)value;
    }
}

template <typename T>
void get(const json& j, const char* key, T& field) {
    if (!j.contains(key)) return;
    // nlohmann silently truncates floats to integer targets; be strict instead
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        requireArg(j.at(key).is_number_integer(),
                   std::string("config key \"") + key + "\" must be an integer");
    }
    try {
        field = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("config key \"") + key + "\" has the wrong type");
    }
}

void parsePhysics(const json& j, ClothParams& p) {
    checkKeys(j,
              {"total_mass", "stiffness_structural", "stiffness_shear", "stiffness_bend",
               "damping", "velocity_damping", "friction_coeff", "gravity", "dt",
               "collision_margin", "velocity_clamp", "strain_limit", "strain_iterations"},
              "env.physics");
    get(j, "total_mass", p.total_mass);
    get(j, "stiffness_structural", p.stiffness_structural);
    get(j, "stiffness_shear", p.stiffness_shear);
    get(j, "stiffness_bend", p.stiffness_bend);
    get(j, "damping", p.damping);
    get(j, "velocity_damping", p.velocity_damping);
    get(j, "friction_coeff", p.friction_coeff);
    get(j, "gravity", p.gravity);
    get(j, "dt", p.dt);
    get(j, "collision_margin", p.collision_margin);
    get(j, "velocity_clamp", p.velocity_clamp);
    get(j, "strain_limit", p.strain_limit);
    get(j, "strain_iterations", p.strain_iterations);
    p.validate();
}

void parseEnv(const json& j, EnvConfig& e) {
    checkKeys(j,
              {"vary_pose", "vary_blanket", "vary_body", "pose_variation", "physics",
               "bed_height", "bed_width", "bed_length", "cloth_rows", "cloth_cols",
               "cloth_width", "cloth_height", "lambda", "lift_height", "transport_speed",
               "settle_vthresh", "reset_settle_steps", "execute_settle_steps",
               "reset_retries", "blanket_edge_offset", "drop_gap"},
              "env");
    get(j, "vary_pose", e.vary_pose);
    get(j, "vary_blanket", e.vary_blanket);
    get(j, "vary_body", e.vary_body);
    get(j, "pose_variation", e.pose_variation);
    if (j.contains("physics")) {
        requireArg(j.at("physics").is_object(), "env.physics must be an object");
        parsePhysics(j.at("physics"), e.physics);
    }
    get(j, "bed_height", e.bed.height);
    double bed_width = e.bed.half_x * 2.0, bed_length = e.bed.half_y * 2.0;
    get(j, "bed_width", bed_width);
    get(j, "bed_length", bed_length);
    e.bed.half_x = bed_width / 2.0;
    e.bed.half_y = bed_length / 2.0;
    get(j, "cloth_rows", e.cloth_rows);
    get(j, "cloth_cols", e.cloth_cols);
    get(j, "cloth_width", e.cloth_width);
    get(j, "cloth_height", e.cloth_height);
    get(j, "lambda", e.lambda);
    get(j, "lift_height", e.lift_height);
    get(j, "transport_speed", e.transport_speed);
    get(j, "settle_vthresh", e.settle_vthresh);
    get(j, "reset_settle_steps", e.reset_settle_steps);
    get(j, "execute_settle_steps", e.execute_settle_steps);
    get(j, "reset_retries", e.reset_retries);
    get(j, "blanket_edge_offset", e.blanket_edge_offset);
    get(j, "drop_gap", e.drop_gap);
    requireArg(e.cloth_rows >= 2 && e.cloth_cols >= 2, "cloth grid must be at least 2x2");
    requireArg(e.lambda > 0.0, "lambda must be > 0");
}

json mergeJson(json base, const json& overrides) {
    for (const auto& [key, value] : overrides.items()) {
        if (value.is_object() && base.contains(key) && base.at(key).is_object())
            base[key] = mergeJson(base.at(key), value);
        else
            base[key] = value;
    }
    return base;
}

}  // namespace

RunConfig parseRunConfig(const std::string& json_text) {
    json j = parseJson(json_text, "run config");
    checkKeys(j,
              {"schema_version", "seed", "workers", "target", "env", "collect_rollouts",
               "per_pose_cap", "advance_reward", "cma_sigma0", "cma_lambda",
               "filter_threshold", "train_mode", "epochs", "batch_size", "learning_rate",
               "ppo_rollouts", "ppo_batch_rollouts", "ppo_sgd_updates", "ppo_sgd_lr",
               "ppo_clip_eps", "ppo_value_coeff", "trials", "targets", "conditions",
               "episode_index", "dataset_path", "model_path", "results_csv",
               "results_md", "episode_log", "frames_dir"},
              "run config");
    RunConfig cfg;
    get(j, "schema_version", cfg.schema_version);
    requireArg(cfg.schema_version == 1, "unsupported config schema_version");
    get(j, "seed", cfg.seed);
    get(j, "workers", cfg.workers);
    requireArg(cfg.workers >= 1, "workers must be >= 1");
    get(j, "target", cfg.target);
    parseTarget(cfg.target);  // validates the name
    if (j.contains("env")) {
        requireArg(j.at("env").is_object(), "env must be an object");
        parseEnv(j.at("env"), cfg.env);
    }
    cfg.env.target = parseTarget(cfg.target);

    get(j, "collect_rollouts", cfg.collect_rollouts);
    get(j, "per_pose_cap", cfg.per_pose_cap);
    get(j, "advance_reward", cfg.advance_reward);
    get(j, "cma_sigma0", cfg.cma_sigma0);
    get(j, "cma_lambda", cfg.cma_lambda);
    get(j, "filter_threshold", cfg.filter_threshold);

    get(j, "train_mode", cfg.train_mode);
    requireArg(cfg.train_mode == "supervised" || cfg.train_mode == "ppo",
               "train_mode must be \"supervised\" or \"ppo\"");
    get(j, "epochs", cfg.epochs);
    get(j, "batch_size", cfg.batch_size);
    get(j, "learning_rate", cfg.learning_rate);
    get(j, "ppo_rollouts", cfg.ppo_rollouts);
    get(j, "ppo_batch_rollouts", cfg.ppo_batch_rollouts);
    get(j, "ppo_sgd_updates", cfg.ppo_sgd_updates);
    get(j, "ppo_sgd_lr", cfg.ppo_sgd_lr);
    get(j, "ppo_clip_eps", cfg.ppo_clip_eps);
    get(j, "ppo_value_coeff", cfg.ppo_value_coeff);

    get(j, "trials", cfg.trials);
    get(j, "targets", cfg.targets);
    for (const std::string& t : cfg.targets) parseTarget(t);
    get(j, "conditions", cfg.conditions);
    requireArg(!cfg.conditions.empty(), "conditions must not be empty");
    for (const std::string& c : cfg.conditions) parseCondition(c);

    get(j, "episode_index", cfg.episode_index);
    get(j, "dataset_path", cfg.dataset_path);
    get(j, "model_path", cfg.model_path);
    get(j, "results_csv", cfg.results_csv);
    get(j, "results_md", cfg.results_md);
    get(j, "episode_log", cfg.episode_log);
    get(j, "frames_dir", cfg.frames_dir);
    return cfg;
}

RunConfig loadRunConfigFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parseRunConfig(ss.str());
}

std::string mergeConfigJson(const std::string& base, const std::string& overrides) {
    return mergeJson(parseJson(base, "base config"), parseJson(overrides, "overrides"))
        .dump();
}

std::string runConfigToJson(const RunConfig& cfg) {
    const ClothParams& p = cfg.env.physics;
    const EnvConfig& e = cfg.env;
    json j;
    j["schema_version"] = cfg.schema_version;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["target"] = cfg.target;
    j["env"] = {
        {"vary_pose", e.vary_pose},
        {"vary_blanket", e.vary_blanket},
        {"vary_body", e.vary_body},
        {"pose_variation", e.pose_variation},
        {"physics",
         {{"total_mass", p.total_mass},
          {"stiffness_structural", p.stiffness_structural},
          {"stiffness_shear", p.stiffness_shear},
          {"stiffness_bend", p.stiffness_bend},
          {"damping", p.damping},
          {"velocity_damping", p.velocity_damping},
          {"friction_coeff", p.friction_coeff},
          {"gravity", p.gravity},
          {"dt", p.dt},
          {"collision_margin", p.collision_margin},
          {"velocity_clamp", p.velocity_clamp},
          {"strain_limit", p.strain_limit},
          {"strain_iterations", p.strain_iterations}}},
        {"bed_height", e.bed.height},
        {"bed_width", e.bed.half_x * 2.0},
        {"bed_length", e.bed.half_y * 2.0},
        {"cloth_rows", e.cloth_rows},
        {"cloth_cols", e.cloth_cols},
        {"cloth_width", e.cloth_width},
        {"cloth_height", e.cloth_height},
        {"lambda", e.lambda},
        {"lift_height", e.lift_height},
        {"transport_speed", e.transport_speed},
        {"settle_vthresh", e.settle_vthresh},
        {"reset_settle_steps", e.reset_settle_steps},
        {"execute_settle_steps", e.execute_settle_steps},
        {"reset_retries", e.reset_retries},
        {"blanket_edge_offset", e.blanket_edge_offset},
        {"drop_gap", e.drop_gap},
    };
    j["collect_rollouts"] = cfg.collect_rollouts;
    j["per_pose_cap"] = cfg.per_pose_cap;
    j["advance_reward"] = cfg.advance_reward;
    j["cma_sigma0"] = cfg.cma_sigma0;
    j["cma_lambda"] = cfg.cma_lambda;
    j["filter_threshold"] = cfg.filter_threshold;
    j["train_mode"] = cfg.train_mode;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["learning_rate"] = cfg.learning_rate;
    j["ppo_rollouts"] = cfg.ppo_rollouts;
    j["ppo_batch_rollouts"] = cfg.ppo_batch_rollouts;
    j["ppo_sgd_updates"] = cfg.ppo_sgd_updates;
    j["ppo_sgd_lr"] = cfg.ppo_sgd_lr;
    j["ppo_clip_eps"] = cfg.ppo_clip_eps;
    j["ppo_value_coeff"] = cfg.ppo_value_coeff;
    j["trials"] = cfg.trials;
    j["targets"] = cfg.targets;
    j["conditions"] = cfg.conditions;
    j["episode_index"] = cfg.episode_index;
    j["dataset_path"] = cfg.dataset_path;
    j["model_path"] = cfg.model_path;
    j["results_csv"] = cfg.results_csv;
    j["results_md"] = cfg.results_md;
    j["episode_log"] = cfg.episode_log;
    j["frames_dir"] = cfg.frames_dir;
    return j.dump(2);
}

}  // namespace bedsim
