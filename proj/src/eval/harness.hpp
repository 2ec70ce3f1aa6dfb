#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "eval/metrics.hpp"
#include "policy/mlp.hpp"

namespace bedsim {

enum class Condition { Original, RandomBlanket, RandomBody };

const char* conditionName(Condition c);
Condition parseCondition(const std::string& name);
const std::array<Condition, 3>& allConditions();

// Apply a generalization condition to a base environment config.
EnvConfig applyCondition(EnvConfig config, Condition condition);

// Run n_trials deterministic-policy episodes with per-trial seeds derived from
// the master seed; aggregate pooled F1, per-trial mean F1, and reward stats.
// The optional callback sees every finished episode (for logging).
using EpisodeCallback = std::function<void(std::uint64_t seed, const Observation& obs,
                                           const Action& requested,
                                           const EpisodeOutcome& outcome)>;

Metrics evaluate(const PolicyModel& model, const EnvConfig& config, int n_trials,
                 std::uint64_t master_seed, const EpisodeCallback& on_episode = {});

struct ComparisonRow {
    TargetName target;
    Condition condition;
    Metrics metrics;
};

// One trained model per target; shared for every target when the callback is
// built from a single model.
using ModelProvider = std::function<const PolicyModel&(TargetName)>;

// Full targets x conditions table under one master seed. The base config's
// target / vary_blanket / vary_body fields are overridden per cell.
std::vector<ComparisonRow> compareConditions(const ModelProvider& models,
                                             const std::vector<TargetName>& targets,
                                             const std::vector<Condition>& conditions,
                                             const EnvConfig& base, int n_trials,
                                             std::uint64_t master_seed);

}  // namespace bedsim
