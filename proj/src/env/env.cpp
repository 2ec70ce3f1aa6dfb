#include "env/env.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace bedsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Action Action::clamped() const {
    Action a = *this;
    a.gx = std::clamp(a.gx, -kMaxX, kMaxX);
    a.gy = std::clamp(a.gy, -kMaxY, kMaxY);
    a.rx = std::clamp(a.rx, -kMaxX, kMaxX);
    a.ry = std::clamp(a.ry, -kMaxY, kMaxY);
    return a;
}

bool Action::inBounds() const {
    return gx >= -kMaxX && gx <= kMaxX && rx >= -kMaxX && rx <= kMaxX &&
           gy >= -kMaxY && gy <= kMaxY && ry >= -kMaxY && ry <= kMaxY;
}

bool covered(const Vec3& point, const ClothMesh& cloth, double lambda) {
    requireArg(lambda > 0.0, "lambda must be > 0");
    const double lim2 = lambda * lambda;
    for (const Vec3& v : cloth.positions) {
        double dx = v.x - point.x, dy = v.y - point.y;
        if (dx * dx + dy * dy < lim2) return true;
    }
    return false;
}

CoverageReport coverageReport(const PointPartition& part, const BodyPointCloud& cloud,
                              const ClothMesh& cloth, double lambda) {
    CoverageReport rep;
    rep.covered.assign(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        rep.covered[i] = covered(cloud.points[i], cloth, lambda) ? 1 : 0;
    rep.n_t = int(part.target.size());
    rep.n_n = int(part.nontarget.size());
    rep.n_h = int(part.head.size());
    for (int i : part.target) rep.rho_t += rep.covered[i] ? 0 : 1;
    for (int i : part.nontarget) rep.rho_n += rep.covered[i] ? 0 : 1;
    for (int i : part.head) rep.rho_h += rep.covered[i] ? 1 : 0;
    return rep;
}

RewardBreakdown reward(const CoverageReport& report, const Action& action) {
    requireArg(report.n_t > 0, "target point set is empty");
    requireArg(report.n_n >= 0 && report.n_h > 0, "degenerate point partition");
    requireArg(report.n_n > 0 || report.rho_n == 0, "uncovered points without a set");
    RewardBreakdown r;
    r.r_target = 100.0 * double(report.rho_t) / report.n_t;
    // the entire-body target has no non-target points; the penalty is then zero
    r.r_nontarget =
        report.n_n > 0 ? -100.0 * double(report.rho_n) / report.n_n : 0.0;
    r.r_head = -200.0 * double(report.rho_h) / report.n_h;
    r.r_distance = action.moveDistance() >= 1.5 ? -150.0 : 0.0;
    r.total = r.r_target + r.r_nontarget + r.r_head + r.r_distance;
    return r;
}

BlanketPose randomizeBlanket(const EnvConfig& config, Rng& rng) {
    if (!config.vary_blanket) return {};
    BlanketPose p;
    p.x = rng.uniform(-0.02, 0.02);
    p.y = rng.uniform(-0.25, 0.05);  // negative = toward the head
    p.yaw = rng.uniform(-kPi / 4.0, kPi / 4.0);
    return p;
}

namespace {

double supportHeight(const ColliderSet& col, double x, double y) {
    Vec3 p{x, y, 0};
    double z = col.floor_height;
    if (col.bed.inExtent(p)) z = std::max(z, col.bed.height);
    for (const Capsule& c : col.capsules) {
        // top of the capsule above (x, y); axes are horizontal
        Vec3 q = c.closestAxisPoint({x, y, c.a.z});
        double dx = q.x - x, dy = q.y - y;
        double d2 = dx * dx + dy * dy;
        double r2 = c.radius * c.radius;
        if (d2 < r2) z = std::max(z, q.z + std::sqrt(r2 - d2));
    }
    return z;
}

// Support height relaxed by a 45 degree cone transform. Cloth bridges narrow
// crevices (neck, between the legs) instead of dipping into them, so draping
// over the tented field conserves material the way a real blanket does.
class TentedSupport {
public:
    TentedSupport(const ColliderSet& col, double x0, double x1, double y0, double y1,
                  double cell)
        : x0_(x0), y0_(y0), cell_(cell) {
        nx_ = int((x1 - x0) / cell) + 2;
        ny_ = int((y1 - y0) / cell) + 2;
        h_.resize(std::size_t(nx_) * ny_);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                h_[at(i, j)] = supportHeight(col, x0_ + i * cell_, y0_ + j * cell_);
        const double ax = cell_, di = cell_ * std::sqrt(2.0);
        auto relax = [&](int i, int j, int pi, int pj, double d) {
            if (pi < 0 || pi >= nx_ || pj < 0 || pj >= ny_) return;
            h_[at(i, j)] = std::max(h_[at(i, j)], h_[at(pi, pj)] - d);
        };
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                relax(i, j, i - 1, j, ax);
                relax(i, j, i, j - 1, ax);
                relax(i, j, i - 1, j - 1, di);
                relax(i, j, i + 1, j - 1, di);
            }
        for (int j = ny_ - 1; j >= 0; --j)
            for (int i = nx_ - 1; i >= 0; --i) {
                relax(i, j, i + 1, j, ax);
                relax(i, j, i, j + 1, ax);
                relax(i, j, i + 1, j + 1, di);
                relax(i, j, i - 1, j + 1, di);
            }
    }

    double operator()(double x, double y) const {
        double fx = (x - x0_) / cell_, fy = (y - y0_) / cell_;
        int i = std::clamp(int(std::floor(fx)), 0, nx_ - 2);
        int j = std::clamp(int(std::floor(fy)), 0, ny_ - 2);
        double u = std::clamp(fx - i, 0.0, 1.0), v = std::clamp(fy - j, 0.0, 1.0);
        return (1 - u) * (1 - v) * h_[at(i, j)] + u * (1 - v) * h_[at(i + 1, j)] +
               (1 - u) * v * h_[at(i, j + 1)] + u * v * h_[at(i + 1, j + 1)];
    }

private:
    std::size_t at(int i, int j) const { return std::size_t(j) * nx_ + i; }
    double x0_, y0_, cell_;
    int nx_ = 0, ny_ = 0;
    std::vector<double> h_;
};

}  // namespace

ClothMesh initBlanket(const EnvConfig& cfg, const HumanModel& human,
                      const ColliderSet& colliders, const BlanketPose& pose) {
    const Capsule& chest = human.segment(Segment::Chest);
    double chest_top = std::min(chest.a.y, chest.b.y) - chest.radius;
    double top_edge = chest_top + cfg.blanket_edge_offset + pose.y;
    double cy = top_edge + cfg.cloth_height / 2.0;
    double cx = pose.x;

    ClothMesh cloth = buildCloth(cfg.physics, cfg.cloth_width, cfg.cloth_height,
                                 cfg.cloth_rows, cfg.cloth_cols, {cx, cy, 0});
    const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
    const double hover = cfg.physics.collision_margin + cfg.drop_gap;
    const double half_w = cfg.cloth_width / 2.0;
    const double half_h = cfg.cloth_height / 2.0;
    const double dy = cfg.cloth_height / (cfg.cloth_rows - 1);

    TentedSupport tent(colliders, cx - half_h - 0.1, cx + half_h + 0.1,
                       cy - half_h - 0.1, cy + half_h + 0.1, 0.02);

    // Largest planar step t in [0, rest] whose 3D step over the tented support
    // stays within one rest length; t = 0 means the material hangs straight
    // down (the tent caps slopes at 45 degrees, so walls never block the walk).
    auto planarStep = [&](const Vec3& from, double ux, double uy, double rest) {
        for (int k = 8; k >= 1; --k) {
            double t = rest * k / 8.0;
            double dz = tent(from.x + ux * t, from.y + uy * t) + hover - from.z;
            if (t * t + dz * dz <= rest * rest * 1.0001) return t;
        }
        return 0.0;
    };
    auto advance = [&](const Vec3& from, double ux, double uy, double rest) {
        double t = planarStep(from, ux, uy, rest);
        if (t > 0) {
            Vec3 q{from.x + ux * t, from.y + uy * t, 0};
            q.z = tent(q.x, q.y) + hover;
            return q;
        }
        // blocked: either a wall rises ahead (climb it in place) or the
        // support drops away (hang straight down)
        double probe = rest / 8.0;
        double ahead = tent(from.x + ux * probe, from.y + uy * probe) + hover;
        if (ahead > from.z) return Vec3{from.x, from.y, std::min(from.z + rest, ahead)};
        double zq = tent(from.x, from.y) + hover;
        return Vec3{from.x, from.y, std::max(zq, from.z - rest)};
    };

    // Drape by arc length: each column starts on the head-side edge and walks
    // feet-ward, spending one rest length of material per row along the 3D
    // support profile. A vertical-projection drape would overstretch the cloth
    // wherever the support height jumps, and the strain limiter would then
    // contract the whole sheet while it settles.
    for (int col = 0; col < cloth.cols; ++col) {
        double fx = -half_w + cfg.cloth_width * col / (cloth.cols - 1);
        Vec3 p{cx + c * fx - s * -half_h, cy + s * fx + c * -half_h, 0};
        p.z = tent(p.x, p.y) + hover;
        cloth.positions[col] = p;
        for (int row = 1; row < cloth.rows; ++row) {
            p = advance(p, -s, c, dy);
            cloth.positions[row * cloth.cols + col] = p;
        }
    }

    // Second pass across the width: wherever a row is still overstretched
    // (mainly columns that walked off the bed sides onto the floor) pull the
    // outer vertex back to one rest length from its inner neighbour, hanging
    // straight down when the support drops away.
    const double dx = cfg.cloth_width / (cloth.cols - 1);
    const int mid = cloth.cols / 2;
    auto relaxRow = [&](int row, int col, int inner_col) {
        const Vec3& inner = cloth.positions[row * cloth.cols + inner_col];
        Vec3& outer = cloth.positions[row * cloth.cols + col];
        if (norm(outer - inner) <= dx * cfg.physics.strain_limit) return;
        Vec3 d{outer.x - inner.x, outer.y - inner.y, 0};
        double planar = norm(d);
        if (planar > 1e-12) d *= 1.0 / planar;
        else d = {c, s, 0};
        outer = advance(inner, d.x, d.y, dx);
    };
    for (int row = 0; row < cloth.rows; ++row) {
        for (int col = mid + 1; col < cloth.cols; ++col) relaxRow(row, col, col - 1);
        for (int col = mid - 1; col >= 0; --col) relaxRow(row, col, col + 1);
    }
    return cloth;
}

Observation observe(const HumanModel& human) {
    requireState(human.placed, "observe requires a placed human");
    Observation o;
    // (RL, LL, RA, LA), each (x, y, theta_z)
    o.values = {human.knee[0].x,  human.knee[0].y,  human.shin_yaw[0],
                human.knee[1].x,  human.knee[1].y,  human.shin_yaw[1],
                human.elbow[0].x, human.elbow[0].y, human.forearm_yaw[0],
                human.elbow[1].x, human.elbow[1].y, human.forearm_yaw[1]};
    return o;
}

Env::Env(EnvConfig config) : cfg_(std::move(config)) {
    cfg_.physics.validate();
    requireArg(cfg_.lambda > 0.0, "lambda must be > 0");
}

const EnvState& Env::state() const {
    requireState(state_.has_value(), "environment has not been reset");
    return *state_;
}

const EnvState& Env::reset(std::uint64_t seed) {
    for (int attempt = 0; attempt < cfg_.reset_retries; ++attempt) {
        Rng pose_rng = Rng::derive(seed, 1000 + std::uint64_t(attempt));
        BodyScale scale;
        if (cfg_.vary_body) {
            Rng body_rng = Rng::derive(seed, 2000 + std::uint64_t(attempt));
            scale = varyBodyShape(body_rng);
        }
        HumanModel human =
            samplePose(pose_rng, cfg_.vary_pose ? cfg_.pose_variation : 0.0, scale);
        if (!placeOnBed(human, cfg_.bed)) continue;

        EnvState st;
        st.human = std::move(human);
        st.seed = seed;
        st.reset_attempts = attempt + 1;
        st.colliders.bed = cfg_.bed;
        st.colliders.floor_height = 0.0;
        st.colliders.capsules.assign(st.human.segments.begin(), st.human.segments.end());
        st.cloud = discretize(st.human);
        st.partition = labelPoints(st.cloud, cfg_.target);

        Rng blanket_rng = Rng::derive(seed, 3000 + std::uint64_t(attempt));
        st.blanket = randomizeBlanket(cfg_, blanket_rng);
        st.cloth = initBlanket(cfg_, st.human, st.colliders, st.blanket);
        settle(st.cloth, st.colliders, cfg_.physics, cfg_.settle_vthresh,
               cfg_.reset_settle_steps);

        CoverageReport rep = coverageReport(st.partition, st.cloud, st.cloth, cfg_.lambda);
        double nonhead = double(rep.n_t + rep.n_n);
        double covered_frac = 1.0 - double(rep.rho_t + rep.rho_n) / nonhead;
        double head_unc = 1.0 - double(rep.rho_h) / std::max(1, rep.n_h);
        bool ok = covered_frac >= 0.99;
        // a randomized blanket may legitimately cover the head at the start
        if (!cfg_.vary_blanket) ok = ok && head_unc >= 0.90;
        if (!ok) continue;

        st.observation = observe(st.human);
        state_ = std::move(st);
        return *state_;
    }
    throw Error(ErrorCode::ResetFailed,
                "reset failed: no valid pose/blanket draw within retry budget");
}

EpisodeOutcome Env::execute(const Action& action, const FrameCallback& on_frame) const {
    const EnvState& st = state();
    EpisodeOutcome out;
    out.executed = action.clamped();
    out.clamped = !action.inBounds();

    ClothMesh cloth = st.cloth;

    // grasp the projected cloth vertex nearest to the grasp point (ties break
    // toward the lowest vertex index)
    int best = 0;
    double best_d2 = 1e18;
    for (int i = 0; i < cloth.vertexCount(); ++i) {
        double dx = cloth.positions[i].x - out.executed.gx;
        double dy = cloth.positions[i].y - out.executed.gy;
        double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    out.anchored_vertex = best;
    anchor(cloth, best);

    double lift_z = cfg_.bed.height + cfg_.lift_height;
    Vec3 grasp_pos = cloth.positions[best];
    std::vector<Vec3> path = {{grasp_pos.x, grasp_pos.y, lift_z},
                              {out.executed.rx, out.executed.ry, lift_z}};
    transportAnchors(cloth, st.colliders, cfg_.physics, path, cfg_.transport_speed, on_frame);
    releaseAnchors(cloth);
    SettleResult sr = settle(cloth, st.colliders, cfg_.physics, cfg_.settle_vthresh,
                             cfg_.execute_settle_steps, on_frame);
    out.settled = sr.settled;

    out.report = coverageReport(st.partition, st.cloud, cloth, cfg_.lambda);
    out.reward = reward(out.report, out.executed);
    return out;
}

}  // namespace bedsim
