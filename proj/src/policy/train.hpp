#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "env/rollout.hpp"
#include "optim/dataset.hpp"
#include "policy/mlp.hpp"

namespace bedsim {

struct TrainConfig {
    int epochs = 100;
    int batch_size = 8;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

struct SupervisedResult {
    PolicyModel model;
    std::vector<double> loss_curve;  // mean sample loss, one entry per epoch
};

// MSE regression from observation to action over the dataset rows. Adam with
// standard moment constants, per-epoch reshuffling, partial final batches.
SupervisedResult trainSupervised(const Dataset& dataset, const TrainConfig& cfg);

struct PpoConfig {
    int total_rollouts = 5000;
    int batch_rollouts = 32;
    int sgd_updates = 50;     // plain SGD steps per batch
    double sgd_lr = 5e-5;
    double clip_eps = 0.2;
    double value_coeff = 0.5;
    std::uint64_t seed = 0;
};

struct PpoResult {
    PolicyModel model;
    std::vector<double> reward_curve;  // mean episode reward per batch
};

// One-step PPO (contextual bandit): each rollout resets to a fresh pose,
// samples a pre-squash action from the Gaussian policy, and receives one
// terminal reward. Advantage = reward/100 - V(s) with the value taken before
// the batch's updates.
PpoResult ppoTrain(const EnvFactory& factory, const PpoConfig& cfg,
                   const std::function<void(int done, int total)>& progress = {});

}  // namespace bedsim
