#include "eval/harness.hpp"

#include "core/error.hpp"

namespace bedsim {

const char* conditionName(Condition c) {
    switch (c) {
        case Condition::Original: return "original";
        case Condition::RandomBlanket: return "random_blanket";
        case Condition::RandomBody: return "random_body";
    }
    return "?";
}

const std::array<Condition, 3>& allConditions() {
    static const std::array<Condition, 3> all = {
        Condition::Original, Condition::RandomBlanket, Condition::RandomBody};
    return all;
}

Condition parseCondition(const std::string& name) {
    for (Condition c : allConditions())
        if (name == conditionName(c)) return c;
    throw Error(ErrorCode::InvalidArgument, "unknown condition: " + name);
}

EnvConfig applyCondition(EnvConfig config, Condition condition) {
    config.vary_blanket = condition == Condition::RandomBlanket;
    config.vary_body = condition == Condition::RandomBody;
    return config;
}

Metrics evaluate(const PolicyModel& model, const EnvConfig& config, int n_trials,
                 std::uint64_t master_seed, const EpisodeCallback& on_episode) {
    requireArg(n_trials >= 1, "n_trials must be >= 1");
    Env env(config);
    std::vector<TrialRecord> trials;
    trials.reserve(n_trials);
    for (int i = 0; i < n_trials; ++i) {
        TrialRecord t;
        t.seed = Rng::deriveSeed(master_seed, 500000 + std::uint64_t(i));
        const EnvState& state = env.reset(t.seed);
        Action action = forward(model, state.observation).action;
        EpisodeOutcome out = env.execute(action);
        if (on_episode) on_episode(t.seed, state.observation, action, out);
        t.counts = countsFromReport(out.report);
        t.f1 = f1Score(t.counts);
        t.reward = out.reward.total;
        trials.push_back(t);
    }
    return aggregateTrials(std::move(trials));
}

std::vector<ComparisonRow> compareConditions(const ModelProvider& models,
                                             const std::vector<TargetName>& targets,
                                             const std::vector<Condition>& conditions,
                                             const EnvConfig& base, int n_trials,
                                             std::uint64_t master_seed) {
    requireArg(!targets.empty() && !conditions.empty(),
               "comparison needs targets and conditions");
    std::vector<ComparisonRow> table;
    table.reserve(targets.size() * conditions.size());
    std::uint64_t cell = 0;
    for (TargetName target : targets) {
        const PolicyModel& model = models(target);
        for (Condition condition : conditions) {
            EnvConfig cfg = applyCondition(base, condition);
            cfg.target = target;
            ComparisonRow row{target, condition, {}};
            // distinct per-cell master seeds keep cells independent while the
            // whole table stays a pure function of one seed
            row.metrics = evaluate(model, cfg, n_trials,
                                   Rng::deriveSeed(master_seed, 700000 + cell));
            table.push_back(std::move(row));
            ++cell;
        }
    }
    return table;
}

}  // namespace bedsim
