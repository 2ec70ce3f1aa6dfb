#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "env/env.hpp"

namespace bedsim {

enum class Activation { ReLU, Tanh };

// Small fully-connected policy with hand-rolled differentiation. The trunk
// maps the 12-number observation to 4 pre-squash outputs; actions are
// center + half-range * tanh(pre) per coordinate, so they always land inside
// the action box. PPO mode adds a linear value head on the last hidden layer
// and a state-independent log-std vector.
struct PolicyModel {
    enum class Mode { Supervised, Ppo };

    Mode mode = Mode::Supervised;
    std::vector<int> sizes;   // e.g. {12, 32, 32, 4}
    Activation hidden_act = Activation::ReLU;
    std::vector<std::vector<double>> W;  // per layer, row-major (out x in)
    std::vector<std::vector<double>> b;

    std::array<double, 4> log_std{};  // ppo only
    std::vector<double> value_w;      // ppo only, 1 x last hidden
    double value_b = 0.0;             // ppo only

    static const std::array<double, 4>& actionHalfRange();

    int layerCount() const { return int(sizes.size()) - 1; }
};

// 12 -> 32 -> 32 -> 4, hidden ReLU; weights uniform in +-1/sqrt(fan_in)
PolicyModel makeSupervisedModel(std::uint64_t seed);
// 12 -> 50 -> 50 -> 4, hidden tanh, value head, log_std = ln 0.3
PolicyModel makePpoModel(std::uint64_t seed);

struct ForwardResult {
    std::array<double, 4> pre{};   // trunk output before squashing
    Action action;                 // squashed and scaled mean
    double value = 0.0;            // ppo only
};

ForwardResult forward(const PolicyModel& model, const Observation& obs);

Action act(const PolicyModel& model, const Observation& obs, bool deterministic,
           Rng& rng);

// Flat parameter vector (all weights, biases, and in ppo mode the value head
// and log-std), used by the optimizers and the finite-difference checks.
int paramCount(const PolicyModel& model);
std::vector<double> getParams(const PolicyModel& model);
void setParams(PolicyModel& model, const std::vector<double>& params);

struct SupervisedSample {
    std::array<double, 12> obs{};
    std::array<double, 4> action{};
};

// Mean squared error between the squashed policy action and the sample action,
// averaged over batch entries and coordinates. Returns loss; grad receives
// d loss / d params.
double supervisedLossGrad(const PolicyModel& model,
                          const std::vector<SupervisedSample>& batch,
                          std::vector<double>& grad);

struct PpoSample {
    std::array<double, 12> obs{};
    std::array<double, 4> u{};  // pre-squash action sample
    double logp_old = 0.0;
    double advantage = 0.0;
    double reward_norm = 0.0;  // reward / 100, the value-head target
};

struct PpoLossParts {
    double total = 0.0;
    double surrogate = 0.0;  // negated clipped surrogate (to minimize)
    double value = 0.0;      // value MSE term
};

// Clipped-surrogate PPO loss for one-step episodes plus value MSE
// (coefficient value_coeff). Returns parts; grad receives d total / d params.
PpoLossParts ppoLossGrad(const PolicyModel& model, const std::vector<PpoSample>& batch,
                         double clip_eps, double value_coeff, std::vector<double>& grad);

// Gaussian log density of u under the model's pre-squash mean and log-std.
double logProbPre(const PolicyModel& model, const std::array<double, 4>& mean_pre,
                  const std::array<double, 4>& u);

// Max relative error between the analytic gradient and central differences
// (h = 1e-5) over every parameter, for the loss implied by the model mode.
double gradCheckSupervised(const PolicyModel& model,
                           const std::vector<SupervisedSample>& batch);
double gradCheckPpo(const PolicyModel& model, const std::vector<PpoSample>& batch,
                    double clip_eps, double value_coeff);

// Versioned text format, hexfloat numbers; load(save(m)) is bit-exact.
void saveModel(const PolicyModel& model, const std::string& path);
PolicyModel loadModel(const std::string& path);

}  // namespace bedsim
