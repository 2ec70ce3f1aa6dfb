#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "physics/collider.hpp"

namespace bedsim {

// Body segments of the capsulized model. Order is fixed; it doubles as the
// point-cloud label space.
enum class Segment : int {
    Head = 0,
    Neck,
    Chest,
    Waist,
    UpperArmR,
    UpperArmL,
    ForearmR,
    ForearmL,
    HandR,
    HandL,
    ThighR,
    ThighL,
    ShinR,
    ShinL,
    FootR,
    FootL,
    Count,
};

constexpr int kSegmentCount = int(Segment::Count);
const char* segmentName(Segment s);

// Yaw offsets (radians) from the base supine pose, applied in the bed plane.
// Anatomical limits (offsets from base):
//   shoulder [-0.35, 0.55], elbow [-0.60, 0.60], hip [-0.25, 0.50], knee [-0.50, 0.50]
struct JointAngles {
    double shoulder_r = 0, shoulder_l = 0;
    double elbow_r = 0, elbow_l = 0;
    double hip_r = 0, hip_l = 0;
    double knee_r = 0, knee_l = 0;
};

struct BodyScale {
    std::array<double, kSegmentCount> length;
    std::array<double, kSegmentCount> radius;
    BodyScale() {
        length.fill(1.0);
        radius.fill(1.0);
    }
};

// Capsule body lying supine, head toward -y, right side toward -x. Capsule z
// coordinates are relative to the supporting surface until placeOnBed().
struct HumanModel {
    JointAngles joints;
    BodyScale scale;
    std::array<Capsule, kSegmentCount> segments;       // bed frame after placement
    std::array<Capsule, kSegmentCount> segments_body;  // body frame (z relative to surface)
    double bed_height = 0.0;
    bool placed = false;

    // joint positions in the bed plane, for observations (index 0 = right)
    std::array<Vec3, 2> shoulder, elbow, wrist, hip, knee, ankle;
    std::array<double, 2> forearm_yaw{}, shin_yaw{};  // radians, atan2 convention

    const Capsule& segment(Segment s) const { return segments[int(s)]; }
};

HumanModel buildHuman(const JointAngles& joints, const BodyScale& scale = {});

// Base supine pose (arms abducted 20 deg, legs 10 deg) with each varied joint
// perturbed by an independent uniform draw in [-variation_rad, +variation_rad].
HumanModel samplePose(Rng& rng, double variation_rad = 0.2, const BodyScale& scale = {});

// Kinematic placement: every capsule rests on the bed surface. Returns false
// (leaving the model unplaced) when an extremity exceeds the bed extent.
bool placeOnBed(HumanModel& human, const BedPlane& bed);

// supine length, head top to foot end (m)
double stature(const HumanModel& human);

struct BodyPointCloud {
    std::vector<Vec3> points;
    std::vector<Segment> labels;
    std::size_t size() const { return points.size(); }
};

// Rings of surface points at ~`spacing` intervals along and around each
// capsule; candidates buried in (or hugging) another segment are dropped so
// only the outer body surface remains.
BodyPointCloud discretize(const HumanModel& human, double spacing = 0.03);

enum class TargetName {
    RightLowerLeg,
    LeftArm,
    BothLowerLegs,
    UpperBody,
    LowerBody,
    EntireBody,
};

TargetName parseTarget(const std::string& name);
const char* targetName(TargetName t);
const std::array<TargetName, 6>& allTargets();

// Index partition of a point cloud: target / non-target / head sets.
struct PointPartition {
    std::vector<int> target;
    std::vector<int> nontarget;
    std::vector<int> head;
};

PointPartition labelPoints(const BodyPointCloud& cloud, TargetName target);

// Per-segment multipliers spanning roughly 160-185 cm of stature.
BodyScale varyBodyShape(Rng& rng);

}  // namespace bedsim
