#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "env/rollout.hpp"
#include "optim/dataset.hpp"

namespace bedsim {

struct CollectConfig {
    std::string target = "upper_body";
    int total_rollouts = 5000;
    int per_pose_cap = 300;        // move on after this many rollouts on one pose
    double advance_reward = 95.0;  // or as soon as a rollout scores this well
    double sigma0 = 0.3;
    int lambda = 8;
    std::uint64_t seed = 0;
};

// Map an unbounded 4-vector into the action box through tanh scaling.
Action boxMapAction(const std::vector<double>& u);

// Self-supervised data mining: per pose, run CMA-ES over actions (fitness is
// negated reward) and record every evaluated rollout. The budget is spent
// exactly; a pose ends at advance_reward, at per_pose_cap, or when the budget
// runs out.
Dataset collectDataset(const EnvFactory& factory, const CollectConfig& cfg,
                       const std::function<void(int done, int total)>& progress = {});

}  // namespace bedsim
