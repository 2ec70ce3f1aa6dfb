#include "policy/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace bedsim {

namespace {

class Adam {
public:
    Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        requireArg(params.size() == m_.size() && grad.size() == m_.size(),
                   "adam: size mismatch");
        ++t_;
        double bc1 = 1.0 - std::pow(beta1_, t_);
        double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
            params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
        }
    }

private:
    static constexpr double beta1_ = 0.9;
    static constexpr double beta2_ = 0.999;
    static constexpr double eps_ = 1e-8;
    double lr_;
    int t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace

SupervisedResult trainSupervised(const Dataset& dataset, const TrainConfig& cfg) {
    requireArg(!dataset.rows.empty(), "training dataset is empty");
    requireArg(cfg.epochs > 0, "epochs must be > 0");
    requireArg(cfg.batch_size > 0, "batch_size must be > 0");
    requireArg(cfg.learning_rate > 0.0, "learning_rate must be > 0");

    std::vector<SupervisedSample> samples(dataset.rows.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].obs = dataset.rows[i].obs;
        samples[i].action = dataset.rows[i].act;
    }

    SupervisedResult result;
    result.model = makeSupervisedModel(cfg.seed);
    std::vector<double> params = getParams(result.model);
    Adam adam(params.size(), cfg.learning_rate);
    Rng shuffle_rng = Rng::derive(cfg.seed, 1);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<double> grad;
    std::vector<SupervisedSample> batch;
    result.loss_curve.reserve(cfg.epochs);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the owned rng keeps runs seed-reproducible
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniformInt(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
            double loss = supervisedLossGrad(result.model, batch, grad);
            epoch_loss += loss * double(batch.size());
            adam.step(params, grad);
            setParams(result.model, params);
        }
        result.loss_curve.push_back(epoch_loss / double(samples.size()));
    }
    return result;
}

PpoResult ppoTrain(const EnvFactory& factory, const PpoConfig& cfg,
                   const std::function<void(int, int)>& progress) {
    requireArg(cfg.total_rollouts > 0, "total_rollouts must be > 0");
    requireArg(cfg.batch_rollouts > 0, "batch_rollouts must be > 0");
    requireArg(cfg.sgd_updates > 0, "sgd_updates must be > 0");
    requireArg(cfg.sgd_lr > 0.0, "sgd_lr must be > 0");

    PpoResult result;
    result.model = makePpoModel(cfg.seed);
    auto env = factory();
    Rng noise_rng = Rng::derive(cfg.seed, 7);
    const auto& half = PolicyModel::actionHalfRange();

    int done = 0;
    std::vector<PpoSample> batch;
    std::vector<double> grad;
    while (done < cfg.total_rollouts) {
        int n = std::min(cfg.batch_rollouts, cfg.total_rollouts - done);
        batch.clear();
        batch.reserve(n);
        double reward_sum = 0.0;
        for (int r = 0; r < n; ++r) {
            std::uint64_t pose_seed =
                Rng::deriveSeed(cfg.seed, 300000 + std::uint64_t(done + r));
            Observation obs = env->reset(pose_seed);
            ForwardResult f = forward(result.model, obs);
            PpoSample s;
            s.obs = obs.values;
            std::array<double, 4> a{};
            for (int i = 0; i < 4; ++i) {
                s.u[i] = f.pre[i] + std::exp(result.model.log_std[i]) * noise_rng.normal();
                a[i] = half[i] * std::tanh(s.u[i]);
            }
            double reward = env->rollout(Action::fromArray(a).clamped());
            s.logp_old = logProbPre(result.model, f.pre, s.u);
            s.reward_norm = reward / 100.0;
            s.advantage = s.reward_norm - f.value;
            reward_sum += reward;
            batch.push_back(s);
        }
        done += n;
        if (progress) progress(done, cfg.total_rollouts);
        result.reward_curve.push_back(reward_sum / double(n));

        std::vector<double> params = getParams(result.model);
        for (int u = 0; u < cfg.sgd_updates; ++u) {
            ppoLossGrad(result.model, batch, cfg.clip_eps, cfg.value_coeff, grad);
            for (std::size_t i = 0; i < params.size(); ++i)
                params[i] -= cfg.sgd_lr * grad[i];
            setParams(result.model, params);
        }
    }
    return result;
}

}  // namespace bedsim
