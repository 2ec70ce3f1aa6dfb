#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bedsim {

struct DatasetRow {
    std::array<double, 12> obs{};
    std::array<double, 4> act{};
    double reward = 0.0;
    std::string target;
    std::uint64_t pose_seed = 0;
};

struct Dataset {
    std::vector<DatasetRow> rows;
    std::size_t size() const { return rows.size(); }
};

// Rows with reward strictly above the threshold, original order preserved.
Dataset filterDataset(const Dataset& ds, double threshold);

// CSV with header obs_0..obs_11,act_0..act_3,reward,target,pose_seed; numbers
// are written round-trippably so identical data yields identical bytes.
void writeDatasetCsv(const Dataset& ds, const std::string& path);
Dataset readDatasetCsv(const std::string& path);

}  // namespace bedsim
