#include "human/human.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace bedsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// base dimensions (m) of the default body, tuned so the 3 cm discretization
// lands near 1775 surface points
struct Dims {
    double head_len = 0.105, head_r = 0.098;
    double neck_gap = 0.037, neck_len = 0.080, neck_r = 0.045;
    double chest_gap = 0.141, chest_len = 0.220, chest_r = 0.130;
    double waist_gap = 0.040, waist_len = 0.170, waist_r = 0.120;
    double shoulder_x = 0.145, shoulder_dy = 0.055;  // dy back from chest top joint
    double hip_x = 0.090, hip_dy = 0.025;            // dy past waist bottom joint
    double ua_len = 0.260, ua_r = 0.054;
    double fa_len = 0.240, fa_r = 0.046;
    double hand_len = 0.160, hand_r = 0.040;
    double thigh_len = 0.330, thigh_r = 0.084;
    double shin_len = 0.305, shin_r = 0.060;
    double foot_len = 0.160, foot_r = 0.048;
    double base_shoulder = 20.0 * kPi / 180.0;  // abduction from body axis
    double base_elbow = -10.0 * kPi / 180.0;    // relative, negative = inward
    double base_hip = 10.0 * kPi / 180.0;
    double base_knee = 0.0;
};

const Dims kDims;

const char* kSegmentNames[kSegmentCount] = {
    "head",        "neck",        "chest",     "waist",     "upper_arm_r", "upper_arm_l",
    "forearm_r",   "forearm_l",   "hand_r",    "hand_l",    "thigh_r",     "thigh_l",
    "shin_r",      "shin_l",      "foot_r",    "foot_l",
};

double clampJoint(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

// limb yaw direction in the bed plane: angle measured from +y (feet direction)
// opening laterally; side = -1 right, +1 left
Vec3 limbDir(double angle, double side) {
    return {side * std::sin(angle), std::cos(angle), 0.0};
}

}  // namespace

const char* segmentName(Segment s) { return kSegmentNames[int(s)]; }

HumanModel buildHuman(const JointAngles& joints_in, const BodyScale& scale) {
    HumanModel m;
    m.scale = scale;
    m.joints = joints_in;
    JointAngles& j = m.joints;
    j.shoulder_r = clampJoint(j.shoulder_r, -0.35, 0.55);
    j.shoulder_l = clampJoint(j.shoulder_l, -0.35, 0.55);
    j.elbow_r = clampJoint(j.elbow_r, -0.60, 0.60);
    j.elbow_l = clampJoint(j.elbow_l, -0.60, 0.60);
    j.hip_r = clampJoint(j.hip_r, -0.25, 0.50);
    j.hip_l = clampJoint(j.hip_l, -0.25, 0.50);
    j.knee_r = clampJoint(j.knee_r, -0.50, 0.50);
    j.knee_l = clampJoint(j.knee_l, -0.50, 0.50);

    const Dims& d = kDims;
    auto len = [&](Segment s, double base) { return base * scale.length[int(s)]; };
    auto rad = [&](Segment s, double base) { return base * scale.radius[int(s)]; };
    auto set = [&](Segment s, const Vec3& a, const Vec3& b, double r) {
        Vec3 az = a, bz = b;
        az.z = bz.z = r;  // axis height so the capsule rests on z = 0
        m.segments_body[int(s)] = Capsule(az, bz, r, segmentName(s));
    };

    // torso chain, head toward -y; built from crown = 0 and recentered below
    double y = 0.0;
    double head_r = rad(Segment::Head, d.head_r);
    double head_a = y + head_r;
    double head_b = head_a + len(Segment::Head, d.head_len);
    set(Segment::Head, {0, head_a, 0}, {0, head_b, 0}, head_r);
    double neck_a = head_b + len(Segment::Neck, d.neck_gap);
    double neck_b = neck_a + len(Segment::Neck, d.neck_len);
    set(Segment::Neck, {0, neck_a, 0}, {0, neck_b, 0}, rad(Segment::Neck, d.neck_r));
    double chest_a = neck_b + len(Segment::Chest, d.chest_gap);
    double chest_b = chest_a + len(Segment::Chest, d.chest_len);
    set(Segment::Chest, {0, chest_a, 0}, {0, chest_b, 0}, rad(Segment::Chest, d.chest_r));
    double waist_a = chest_b + len(Segment::Waist, d.waist_gap);
    double waist_b = waist_a + len(Segment::Waist, d.waist_len);
    set(Segment::Waist, {0, waist_a, 0}, {0, waist_b, 0}, rad(Segment::Waist, d.waist_r));

    // limbs: index 0 = right (side -1, toward -x), 1 = left
    const double sides[2] = {-1.0, 1.0};
    const double shoulder_ang[2] = {d.base_shoulder + j.shoulder_r,
                                    d.base_shoulder + j.shoulder_l};
    const double elbow_ang[2] = {d.base_elbow + j.elbow_r, d.base_elbow + j.elbow_l};
    const double hip_ang[2] = {d.base_hip + j.hip_r, d.base_hip + j.hip_l};
    const double knee_ang[2] = {d.base_knee + j.knee_r, d.base_knee + j.knee_l};
    const Segment ua[2] = {Segment::UpperArmR, Segment::UpperArmL};
    const Segment fa[2] = {Segment::ForearmR, Segment::ForearmL};
    const Segment hd[2] = {Segment::HandR, Segment::HandL};
    const Segment th[2] = {Segment::ThighR, Segment::ThighL};
    const Segment sh[2] = {Segment::ShinR, Segment::ShinL};
    const Segment ft[2] = {Segment::FootR, Segment::FootL};

    for (int i = 0; i < 2; ++i) {
        double s = sides[i];
        Vec3 S{s * d.shoulder_x * scale.radius[int(Segment::Chest)], chest_a - d.shoulder_dy, 0};
        Vec3 dir_ua = limbDir(shoulder_ang[i], s);
        Vec3 E = S + dir_ua * len(ua[i], d.ua_len);
        set(ua[i], S, E, rad(ua[i], d.ua_r));
        double fa_yaw = shoulder_ang[i] + elbow_ang[i];
        Vec3 dir_fa = limbDir(fa_yaw, s);
        Vec3 W = E + dir_fa * len(fa[i], d.fa_len);
        set(fa[i], E, W, rad(fa[i], d.fa_r));
        Vec3 H = W + dir_fa * len(hd[i], d.hand_len);
        set(hd[i], W, H, rad(hd[i], d.hand_r));
        m.shoulder[i] = S;
        m.elbow[i] = E;
        m.wrist[i] = W;
        // yaw of the forearm axis, standard atan2 convention in the bed plane
        m.forearm_yaw[i] = std::atan2(dir_fa.y, dir_fa.x);

        Vec3 P{s * d.hip_x * scale.radius[int(Segment::Waist)], waist_b + d.hip_dy, 0};
        Vec3 dir_th = limbDir(hip_ang[i], s);
        Vec3 K = P + dir_th * len(th[i], d.thigh_len);
        set(th[i], P, K, rad(th[i], d.thigh_r));
        double shin_yaw = hip_ang[i] + knee_ang[i];
        Vec3 dir_sh = limbDir(shin_yaw, s);
        Vec3 A = K + dir_sh * len(sh[i], d.shin_len);
        set(sh[i], K, A, rad(sh[i], d.shin_r));
        Vec3 F = A + dir_sh * len(ft[i], d.foot_len);
        set(ft[i], A, F, rad(ft[i], d.foot_r));
        m.hip[i] = P;
        m.knee[i] = K;
        m.ankle[i] = A;
        m.shin_yaw[i] = std::atan2(dir_sh.y, dir_sh.x);
    }

    // recenter the body on y = 0
    double ymin = 1e9, ymax = -1e9;
    for (const Capsule& c : m.segments_body) {
        ymin = std::min(ymin, std::min(c.a.y, c.b.y) - c.radius);
        ymax = std::max(ymax, std::max(c.a.y, c.b.y) + c.radius);
    }
    double shift = -(ymin + ymax) / 2.0;
    for (Capsule& c : m.segments_body) {
        c.a.y += shift;
        c.b.y += shift;
    }
    auto shift_joints = [&](std::array<Vec3, 2>& a) {
        a[0].y += shift;
        a[1].y += shift;
    };
    shift_joints(m.shoulder);
    shift_joints(m.elbow);
    shift_joints(m.wrist);
    shift_joints(m.hip);
    shift_joints(m.knee);
    shift_joints(m.ankle);

    m.segments = m.segments_body;
    return m;
}

HumanModel samplePose(Rng& rng, double variation_rad, const BodyScale& scale) {
    requireArg(variation_rad >= 0.0, "pose variation must be >= 0");
    JointAngles j;
    j.shoulder_r = rng.uniform(-variation_rad, variation_rad);
    j.shoulder_l = rng.uniform(-variation_rad, variation_rad);
    j.elbow_r = rng.uniform(-variation_rad, variation_rad);
    j.elbow_l = rng.uniform(-variation_rad, variation_rad);
    j.hip_r = rng.uniform(-variation_rad, variation_rad);
    j.hip_l = rng.uniform(-variation_rad, variation_rad);
    j.knee_r = rng.uniform(-variation_rad, variation_rad);
    j.knee_l = rng.uniform(-variation_rad, variation_rad);
    return buildHuman(j, scale);
}

bool placeOnBed(HumanModel& human, const BedPlane& bed) {
    for (int i = 0; i < kSegmentCount; ++i) {
        const Capsule& c = human.segments_body[i];
        double r = c.radius;
        double min_x = std::min(c.a.x, c.b.x) - r, max_x = std::max(c.a.x, c.b.x) + r;
        double min_y = std::min(c.a.y, c.b.y) - r, max_y = std::max(c.a.y, c.b.y) + r;
        if (min_x < -bed.half_x || max_x > bed.half_x || min_y < -bed.half_y ||
            max_y > bed.half_y)
            return false;
    }
    human.segments = human.segments_body;
    for (Capsule& c : human.segments) {
        c.a.z += bed.height;
        c.b.z += bed.height;
    }
    human.bed_height = bed.height;
    human.placed = true;
    return true;
}

double stature(const HumanModel& human) {
    double ymin = 1e9, ymax = -1e9;
    for (const Capsule& c : human.segments_body) {
        ymin = std::min(ymin, std::min(c.a.y, c.b.y) - c.radius);
        ymax = std::max(ymax, std::max(c.a.y, c.b.y) + c.radius);
    }
    return ymax - ymin;
}

BodyPointCloud discretize(const HumanModel& human, double spacing) {
    requireArg(spacing > 0.0, "spacing must be > 0");
    const auto& caps = human.placed ? human.segments : human.segments_body;
    BodyPointCloud cloud;

    // drop candidates hugging another segment; keeps the outer surface only
    const double buffer = 0.3 * spacing;
    auto buried = [&](const Vec3& p, int self) {
        for (int i = 0; i < kSegmentCount; ++i) {
            if (i == self) continue;
            if (caps[i].contains(p, buffer)) return true;
        }
        return false;
    };
    auto emit = [&](const Vec3& p, int seg) {
        if (!buried(p, seg)) {
            cloud.points.push_back(p);
            cloud.labels.push_back(Segment(seg));
        }
    };

    for (int si = 0; si < kSegmentCount; ++si) {
        const Capsule& c = caps[si];
        Vec3 axis = c.b - c.a;
        double L = norm(axis);
        Vec3 d = L > 0 ? axis * (1.0 / L) : Vec3{0, 1, 0};
        Vec3 up = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 u = normalized(cross(d, up));
        Vec3 v = cross(d, u);
        auto ring = [&](const Vec3& center, double r) {
            int mpts = std::max(1, int(std::lround(2.0 * kPi * r / spacing)));
            for (int k = 0; k < mpts; ++k) {
                double a = 2.0 * kPi * k / mpts;
                emit(center + r * (std::cos(a) * u + std::sin(a) * v), si);
            }
        };
        int nrings = int(std::floor(L / spacing + 1e-9)) + 1;
        for (int i = 0; i < nrings; ++i) ring(c.a + d * (i * spacing), c.radius);
        for (double sign : {-1.0, 1.0}) {
            const Vec3& end = sign < 0 ? c.a : c.b;
            for (int k = 1; k * spacing < kPi * c.radius / 2.0; ++k) {
                double theta = k * spacing / c.radius;
                ring(end + sign * d * (c.radius * std::sin(theta)),
                     c.radius * std::cos(theta));
            }
            emit(end + sign * d * c.radius, si);
        }
    }
    return cloud;
}

namespace {
const std::array<TargetName, 6> kAllTargets = {
    TargetName::RightLowerLeg, TargetName::LeftArm,   TargetName::BothLowerLegs,
    TargetName::UpperBody,     TargetName::LowerBody, TargetName::EntireBody,
};
}

const std::array<TargetName, 6>& allTargets() { return kAllTargets; }

const char* targetName(TargetName t) {
    switch (t) {
        case TargetName::RightLowerLeg: return "right_lower_leg";
        case TargetName::LeftArm: return "left_arm";
        case TargetName::BothLowerLegs: return "both_lower_legs";
        case TargetName::UpperBody: return "upper_body";
        case TargetName::LowerBody: return "lower_body";
        case TargetName::EntireBody: return "entire_body";
    }
    throw Error(ErrorCode::Internal, "bad target enum");
}

TargetName parseTarget(const std::string& name) {
    for (TargetName t : kAllTargets)
        if (name == targetName(t)) return t;
    throw Error(ErrorCode::InvalidArgument, "unknown target: " + name);
}

PointPartition labelPoints(const BodyPointCloud& cloud, TargetName target) {
    auto inTarget = [&](Segment s) {
        switch (target) {
            case TargetName::RightLowerLeg:
                return s == Segment::ShinR || s == Segment::FootR;
            case TargetName::LeftArm:
                return s == Segment::UpperArmL || s == Segment::ForearmL ||
                       s == Segment::HandL;
            case TargetName::BothLowerLegs:
                return s == Segment::ShinR || s == Segment::ShinL || s == Segment::FootR ||
                       s == Segment::FootL;
            case TargetName::UpperBody:
                return s == Segment::Chest || s == Segment::UpperArmR ||
                       s == Segment::UpperArmL || s == Segment::ForearmR ||
                       s == Segment::ForearmL || s == Segment::HandR || s == Segment::HandL;
            case TargetName::LowerBody:
                return s == Segment::Waist || s == Segment::ThighR || s == Segment::ThighL ||
                       s == Segment::ShinR || s == Segment::ShinL || s == Segment::FootR ||
                       s == Segment::FootL;
            case TargetName::EntireBody:
                return s != Segment::Head && s != Segment::Neck;
        }
        return false;
    };
    PointPartition part;
    for (int i = 0; i < int(cloud.size()); ++i) {
        Segment s = cloud.labels[i];
        if (s == Segment::Head || s == Segment::Neck)
            part.head.push_back(i);
        else if (inTarget(s))
            part.target.push_back(i);
        else
            part.nontarget.push_back(i);
    }
    return part;
}

BodyScale varyBodyShape(Rng& rng) {
    static const double base = stature(buildHuman({}));
    double target = rng.uniform(1.60, 1.85);
    double u = target / base;
    BodyScale s;
    for (int i = 0; i < kSegmentCount; ++i) {
        s.length[i] = u * rng.uniform(0.99, 1.01);
        s.radius[i] = rng.uniform(0.96, 1.06);
    }
    return s;
}

}  // namespace bedsim
