#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/rng.hpp"
#include "human/human.hpp"
#include "physics/cloth.hpp"

namespace bedsim {

// 12 numbers: for right leg, left leg, right arm, left arm the 2D knee/elbow
// position and shin/forearm yaw, all in bed-frame coordinates
struct Observation {
    std::array<double, 12> values{};
    double operator[](int i) const { return values[i]; }
};

struct Action {
    double gx = 0, gy = 0, rx = 0, ry = 0;

    static constexpr double kMaxX = 0.44;
    static constexpr double kMaxY = 1.05;

    Action clamped() const;
    bool inBounds() const;
    double moveDistance() const {  // 2D grasp-to-release distance
        double dx = rx - gx, dy = ry - gy;
        return std::sqrt(dx * dx + dy * dy);
    }
    std::array<double, 4> asArray() const { return {gx, gy, rx, ry}; }
    static Action fromArray(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

struct CoverageReport {
    std::vector<std::uint8_t> covered;  // per cloud point
    int rho_t = 0, rho_n = 0, rho_h = 0;
    int n_t = 0, n_n = 0, n_h = 0;
};

struct RewardBreakdown {
    double r_target = 0, r_nontarget = 0, r_head = 0, r_distance = 0;
    double total = 0;
};

struct BlanketPose {
    double x = 0, y = 0, yaw = 0;  // offsets from the calibrated default
};

struct EnvConfig {
    TargetName target = TargetName::UpperBody;
    bool vary_pose = true;
    bool vary_blanket = false;
    bool vary_body = false;
    double pose_variation = 0.2;  // rad

    ClothParams physics;
    BedPlane bed;                    // 0.88 x 2.1 m, height 0.6
    int cloth_rows = 51;             // 41 x 51 = 2091 vertices
    int cloth_cols = 41;
    double cloth_width = 1.25;       // m, across the bed
    double cloth_height = 1.70;      // m, along the bed
    double lambda = 0.028;           // m, coverage threshold

    double lift_height = 0.40;       // m above the bed surface
    double transport_speed = 0.40;   // m/s
    double settle_vthresh = 0.01;    // m/s
    int reset_settle_steps = 1200;
    int execute_settle_steps = 1200;
    int reset_retries = 10;

    // blanket top edge starts this far feet-ward of the chest surface top; the
    // sheet creeps a few cm headward while it settles into the neck crevice,
    // so the starting edge is biased toward the feet
    double blanket_edge_offset = 0.045;
    double drop_gap = 0.01;  // m, initial hover above the supporting surface
};

struct EnvState {
    HumanModel human;
    BodyPointCloud cloud;
    PointPartition partition;
    ColliderSet colliders;
    ClothMesh cloth;  // settled reset snapshot
    Observation observation;
    BlanketPose blanket;
    std::uint64_t seed = 0;
    int reset_attempts = 0;
};

struct EpisodeOutcome {
    CoverageReport report;
    RewardBreakdown reward;
    Action executed;      // after clamping
    bool clamped = false;
    bool settled = true;
    int anchored_vertex = -1;
};

// Eq-style coverage test: true iff some projected cloth vertex lies within
// planar distance lambda of the projected body point.
bool covered(const Vec3& point, const ClothMesh& cloth, double lambda);

CoverageReport coverageReport(const PointPartition& part, const BodyPointCloud& cloud,
                              const ClothMesh& cloth, double lambda);

RewardBreakdown reward(const CoverageReport& report, const Action& action);

BlanketPose randomizeBlanket(const EnvConfig& config, Rng& rng);

class Env {
public:
    explicit Env(EnvConfig config);

    const EnvConfig& config() const { return cfg_; }

    // Samples (and if needed resamples) human + blanket until the reset
    // contract holds; throws Error(ResetFailed) after the retry budget.
    const EnvState& reset(std::uint64_t seed);

    const EnvState& state() const;
    bool hasState() const { return state_.has_value(); }

    // Runs one grasp/lift/drag/release episode from the reset snapshot; the
    // snapshot itself is untouched so multiple actions can be tried per reset.
    EpisodeOutcome execute(const Action& action, const FrameCallback& on_frame = {}) const;

private:
    EnvConfig cfg_;
    std::optional<EnvState> state_;
};

Observation observe(const HumanModel& human);

// Initial blanket drape: each column of vertices walks feet-ward from the top
// edge spending one rest length of material per row over a tented support
// field, so the sheet starts near equilibrium before it is settled.
ClothMesh initBlanket(const EnvConfig& cfg, const HumanModel& human,
                      const ColliderSet& colliders, const BlanketPose& pose);

}  // namespace bedsim
