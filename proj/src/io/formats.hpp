#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env/env.hpp"
#include "eval/harness.hpp"
#include "physics/cloth.hpp"

namespace bedsim {

// ---- frame export (replay) -------------------------------------------------
// One JSON document per frame: schema tag, timestamp, grid shape, vertex
// positions row-major as [x, y, z] triples, anchors as {vertex, target}.
std::string frameToJson(const ClothMesh& mesh);
void writeFrameFile(const ClothMesh& mesh, const std::string& path);
ClothMesh readFrameFile(const std::string& path);  // positions/anchors only

// ---- episode log -----------------------------------------------------------
// One JSON record per rollout, one per line (JSON Lines).
struct EpisodeRecord {
    std::uint64_t seed = 0;
    std::string target;
    std::array<double, 12> observation{};
    std::array<double, 4> action{};    // as requested
    std::array<double, 4> executed{};  // after clamping
    int rho_t = 0, rho_n = 0, rho_h = 0;
    int n_t = 0, n_n = 0, n_h = 0;
    double r_target = 0, r_nontarget = 0, r_head = 0, r_distance = 0;
    double reward = 0;
    bool clamped = false;
    bool settled = true;
};

EpisodeRecord makeEpisodeRecord(std::uint64_t seed, TargetName target,
                                const Observation& obs, const Action& requested,
                                const EpisodeOutcome& outcome);

std::string episodeRecordToJson(const EpisodeRecord& rec);
EpisodeRecord episodeRecordFromJson(const std::string& line);

void writeEpisodeLog(const std::vector<EpisodeRecord>& records, const std::string& path);
std::vector<EpisodeRecord> readEpisodeLog(const std::string& path);

// ---- results table ---------------------------------------------------------
// CSV header: target,condition,trials,TP,FP,FN,F1,mean_reward,std_reward
// (F1 column is the pooled-count value; the Markdown table carries both the
// pooled and per-trial-mean F1.)
std::string resultsToCsv(const std::vector<ComparisonRow>& rows);
std::string resultsToMarkdown(const std::vector<ComparisonRow>& rows);
void writeResults(const std::vector<ComparisonRow>& rows, const std::string& csv_path,
                  const std::string& markdown_path);

}  // namespace bedsim
