#include "optim/collect.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "optim/cma.hpp"

namespace bedsim {

Action boxMapAction(const std::vector<double>& u) {
    requireArg(u.size() == 4, "action search vector must have 4 entries");
    return {Action::kMaxX * std::tanh(u[0]), Action::kMaxY * std::tanh(u[1]),
            Action::kMaxX * std::tanh(u[2]), Action::kMaxY * std::tanh(u[3])};
}

Dataset collectDataset(const EnvFactory& factory, const CollectConfig& cfg,
                       const std::function<void(int, int)>& progress) {
    requireArg(cfg.total_rollouts > 0, "total_rollouts must be > 0");
    requireArg(cfg.per_pose_cap > 0, "per_pose_cap must be > 0");
    requireArg(cfg.lambda >= 2, "lambda must be >= 2");

    Dataset ds;
    ds.rows.reserve(cfg.total_rollouts);
    auto env = factory();

    int budget = cfg.total_rollouts;
    std::uint64_t pose_index = 0;
    while (budget > 0) {
        std::uint64_t pose_seed = Rng::deriveSeed(cfg.seed, 100000 + pose_index);
        Observation obs = env->reset(pose_seed);
        Rng cma_rng = Rng::derive(cfg.seed, 200000 + pose_index);
        Cma cma(std::vector<double>(4, 0.0), cfg.sigma0, cfg.lambda);

        int pose_rollouts = 0;
        bool advance = false;
        while (!advance && pose_rollouts < cfg.per_pose_cap && budget > 0) {
            auto candidates = cma.ask(cma_rng);
            int cap = std::min({int(candidates.size()), cfg.per_pose_cap - pose_rollouts,
                                budget});
            std::vector<double> fitness(candidates.size(), 0.0);
            int evaluated = 0;
            for (int c = 0; c < cap && !advance; ++c) {
                Action action = boxMapAction(candidates[c]);
                double reward = env->rollout(action);
                DatasetRow row;
                row.obs = obs.values;
                row.act = action.asArray();
                row.reward = reward;
                row.target = cfg.target;
                row.pose_seed = pose_seed;
                ds.rows.push_back(std::move(row));
                fitness[c] = -reward;
                ++evaluated;
                if (reward >= cfg.advance_reward) advance = true;
            }
            pose_rollouts += evaluated;
            budget -= evaluated;
            if (progress) progress(cfg.total_rollouts - budget, cfg.total_rollouts);
            // a full generation updates the strategy; a partial one (budget or
            // cap boundary, or an advancing rollout) ends the pose instead
            if (!advance && evaluated == int(candidates.size()))
                cma.tell(candidates, fitness);
            else if (evaluated < int(candidates.size()))
                break;
        }
        ++pose_index;
    }
    return ds;
}

}  // namespace bedsim
