#pragma once

#include <functional>
#include <memory>

#include "env/env.hpp"

namespace bedsim {

// Narrow environment view used by the data-collection and PPO loops: reset to
// a pose, observe, run single-step rollouts against the reset snapshot. Tests
// substitute stubs with analytic rewards.
class RolloutEnv {
public:
    virtual ~RolloutEnv() = default;
    virtual Observation reset(std::uint64_t seed) = 0;
    virtual double rollout(const Action& action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<RolloutEnv>()>;

class SimRolloutEnv : public RolloutEnv {
public:
    explicit SimRolloutEnv(EnvConfig config) : env_(std::move(config)) {}

    Observation reset(std::uint64_t seed) override {
        return env_.reset(seed).observation;
    }

    double rollout(const Action& action) override {
        return env_.execute(action).reward.total;
    }

    const Env& env() const { return env_; }

private:
    Env env_;
};

inline EnvFactory simEnvFactory(EnvConfig config) {
    return [config]() { return std::make_unique<SimRolloutEnv>(config); };
}

}  // namespace bedsim
