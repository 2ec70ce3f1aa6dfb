#include "eval/metrics.hpp"

#include <cmath>

#include "core/error.hpp"

namespace bedsim {

ConfusionCounts countsFromReport(const CoverageReport& report) {
    ConfusionCounts c;
    c.tp = report.rho_t;
    c.fp = report.rho_n;
    c.fn = report.n_t - report.rho_t;
    return c;
}

double f1Score(const ConfusionCounts& c) {
    requireArg(c.tp >= 0 && c.fp >= 0 && c.fn >= 0, "confusion counts must be >= 0");
    if (c.tp == 0) return 0.0;
    return double(c.tp) / (double(c.tp) + 0.5 * double(c.fp + c.fn));
}

Metrics aggregateTrials(std::vector<TrialRecord> trials) {
    requireArg(!trials.empty(), "metrics need at least one trial");
    Metrics m;
    double f1_sum = 0.0, r_sum = 0.0;
    for (const TrialRecord& t : trials) {
        m.pooled.tp += t.counts.tp;
        m.pooled.fp += t.counts.fp;
        m.pooled.fn += t.counts.fn;
        f1_sum += t.f1;
        r_sum += t.reward;
    }
    double n = double(trials.size());
    m.f1_pooled = f1Score(m.pooled);
    m.f1_mean = f1_sum / n;
    m.mean_reward = r_sum / n;
    double var = 0.0;
    for (const TrialRecord& t : trials) {
        double d = t.reward - m.mean_reward;
        var += d * d;
    }
    m.std_reward = std::sqrt(var / n);
    m.trials = std::move(trials);
    return m;
}

}  // namespace bedsim
