#include "optim/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace bedsim {

Dataset filterDataset(const Dataset& ds, double threshold) {
    Dataset out;
    for (const DatasetRow& row : ds.rows)
        if (row.reward > threshold) out.rows.push_back(row);
    return out;
}

namespace {

std::string fmt(double v) {
    require(std::isfinite(v), ErrorCode::InvalidArgument, "dataset value not finite");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void writeDatasetCsv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot open dataset file for writing: " + path);
    out << "obs_0,obs_1,obs_2,obs_3,obs_4,obs_5,obs_6,obs_7,obs_8,obs_9,obs_10,obs_11,"
           "act_0,act_1,act_2,act_3,reward,target,pose_seed\n";
    for (const DatasetRow& row : ds.rows) {
        for (double v : row.obs) out << fmt(v) << ',';
        for (double v : row.act) out << fmt(v) << ',';
        out << fmt(row.reward) << ',' << row.target << ',' << row.pose_seed << '\n';
    }
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

Dataset readDatasetCsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open dataset file: " + path);
    std::string line;
    require(bool(std::getline(in, line)), ErrorCode::Io, "dataset file empty: " + path);

    Dataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        require(cells.size() == 19, ErrorCode::Io,
                "dataset row " + std::to_string(line_no) + " has wrong arity");
        DatasetRow row;
        try {
            for (int i = 0; i < 12; ++i) row.obs[i] = std::stod(cells[i]);
            for (int i = 0; i < 4; ++i) row.act[i] = std::stod(cells[12 + i]);
            row.reward = std::stod(cells[16]);
            row.target = cells[17];
            row.pose_seed = std::stoull(cells[18]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io,
                        "dataset row " + std::to_string(line_no) + " is not numeric");
        }
        require(std::isfinite(row.reward), ErrorCode::Io, "non-finite reward in dataset");
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

}  // namespace bedsim
