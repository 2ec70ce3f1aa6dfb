#pragma once

#include <cstdint>
#include <vector>

#include "env/env.hpp"

namespace bedsim {

struct ConfusionCounts {
    long long tp = 0;  // target points uncovered
    long long fp = 0;  // non-target points uncovered
    long long fn = 0;  // target points left covered
};

// TP = rho_t, FP = rho_n, FN = |P_t| - rho_t.
ConfusionCounts countsFromReport(const CoverageReport& report);

// F1 = TP / (TP + 0.5 * (FP + FN)); defined as 0 when TP = 0.
double f1Score(const ConfusionCounts& c);

struct TrialRecord {
    std::uint64_t seed = 0;
    ConfusionCounts counts;
    double f1 = 0.0;
    double reward = 0.0;
};

struct Metrics {
    ConfusionCounts pooled;     // summed over trials
    double f1_pooled = 0.0;     // F1 of the pooled counts
    double f1_mean = 0.0;       // mean of per-trial F1 (pooling is ambiguous
                                // in the source metric, so both are reported)
    double mean_reward = 0.0;
    double std_reward = 0.0;    // population standard deviation
    std::vector<TrialRecord> trials;
};

Metrics aggregateTrials(std::vector<TrialRecord> trials);

}  // namespace bedsim
