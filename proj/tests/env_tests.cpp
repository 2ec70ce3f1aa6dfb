#include <cmath>

#include "core/error.hpp"
#include "doctest.h"
#include "env/env.hpp"

using namespace bedsim;

namespace {

// independent exhaustive implementation of the coverage rule
bool coveredBruteForce(const Vec3& point, const ClothMesh& cloth, double lambda) {
    for (const Vec3& v : cloth.positions) {
        double dx = v.x - point.x, dy = v.y - point.y;
        if (std::sqrt(dx * dx + dy * dy) < lambda) return true;
    }
    return false;
}

ClothMesh randomCloth(Rng& rng) {
    ClothParams p;
    ClothMesh cloth = buildCloth(p, 1.25, 1.70, 13, 11, {0, 0, 0.6});
    for (auto& v : cloth.positions)
        v = v + Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                     rng.uniform(-0.1, 0.1));
    return cloth;
}

CoverageReport makeReport(Rng& rng) {
    CoverageReport r;
    r.n_t = 1 + int(rng.uniformInt(500));
    r.n_n = 1 + int(rng.uniformInt(1500));
    r.n_h = 1 + int(rng.uniformInt(120));
    r.rho_t = int(rng.uniformInt(r.n_t + 1));
    r.rho_n = int(rng.uniformInt(r.n_n + 1));
    r.rho_h = int(rng.uniformInt(r.n_h + 1));
    return r;
}

}  // namespace

TEST_CASE("coverage classification matches a brute-force scan") {
    Rng rng(17);
    const double lambda = 0.028;
    int covered_count = 0;
    for (int c = 0; c < 20; ++c) {
        ClothMesh cloth = randomCloth(rng);
        for (int i = 0; i < 50; ++i) {
            Vec3 p{rng.uniform(-0.8, 0.8), rng.uniform(-1.1, 1.1), 0.62};
            bool fast = covered(p, cloth, lambda);
            CHECK(fast == coveredBruteForce(p, cloth, lambda));
            covered_count += fast;
        }
    }
    CHECK(covered_count > 0);  // the case mix exercises both outcomes
}

TEST_CASE("coverage threshold is strict and planar") {
    ClothParams p;
    ClothMesh cloth = buildCloth(p, 0.1, 0.1, 2, 2, {0, 0, 0.6});
    cloth.positions = {{0, 0, 0.6}, {1, 0, 0.6}, {0, 1, 0.6}, {1, 1, 0.6}};
    double lambda = 0.028;
    CHECK(covered({0.028 - 1e-9, 0, 0}, cloth, lambda));
    CHECK_FALSE(covered({0.028, 0, 0}, cloth, lambda));       // boundary excluded
    CHECK(covered({0, 0.0279, 123.0}, cloth, lambda));        // z ignored
    CHECK_THROWS_AS(covered({0, 0, 0}, cloth, 0.0), Error);
}

TEST_CASE("constructed half-cover report") {
    ClothParams params;
    // cloth strip over y < 0 only
    ClothMesh cloth = buildCloth(params, 2.0, 1.0, 21, 21, {0, -0.5, 0});
    BodyPointCloud cloud;
    PointPartition part;
    for (int i = 0; i < 10; ++i) {
        cloud.points.push_back({0, -0.4 + 0.08 * i, 0});  // 5 under, 5 outside
        cloud.labels.push_back(Segment::Chest);
        part.target.push_back(i);
    }
    CoverageReport rep = coverageReport(part, cloud, cloth, 0.028);
    int expect_uncovered = 0;
    for (int i = 0; i < 10; ++i)
        if (!coveredBruteForce(cloud.points[i], cloth, 0.028)) ++expect_uncovered;
    CHECK(rep.rho_t == expect_uncovered);
    CHECK(rep.rho_t > 0);
    CHECK(rep.rho_t < 10);
}

TEST_CASE("reward identities hold on randomized reports") {
    Rng rng(23);
    for (int i = 0; i < 10000; ++i) {
        CoverageReport rep = makeReport(rng);
        Action a{rng.uniform(-0.44, 0.44), rng.uniform(-1.05, 1.05),
                 rng.uniform(-0.44, 0.44), rng.uniform(-1.05, 1.05)};
        RewardBreakdown r = reward(rep, a);
        CHECK(r.total ==
              doctest::Approx(r.r_target + r.r_nontarget + r.r_head + r.r_distance)
                  .epsilon(1e-12));
        CHECK(r.total <= 100.0 + 1e-12);
        CHECK(r.r_target >= 0.0);
        CHECK(r.r_nontarget <= 0.0);
        CHECK(r.r_head <= 0.0);
    }
}

TEST_CASE("constructed reward cases") {
    Action still{0, 0, 0, 0};
    CoverageReport perfect;
    perfect.n_t = 40;
    perfect.rho_t = 40;
    perfect.n_n = 100;
    perfect.n_h = 10;
    CHECK(reward(perfect, still).total == 100.0);

    CoverageReport headcov;
    headcov.n_t = 40;
    headcov.n_n = 100;
    headcov.n_h = 10;
    headcov.rho_h = 10;
    RewardBreakdown r = reward(headcov, still);
    CHECK(r.r_head == -200.0);
    CHECK(r.total == -200.0);

    Action longmove{0, -0.8, 0, 0.8};  // 1.6 m
    RewardBreakdown rd = reward(perfect, longmove);
    CHECK(rd.r_distance == -150.0);
    CHECK(rd.total == -50.0);
    Action edge{0, -0.75, 0, 0.75};  // exactly 1.5 m triggers the penalty
    CHECK(reward(perfect, edge).r_distance == -150.0);
    Action shorter{0, -0.74, 0, 0.74};
    CHECK(reward(perfect, shorter).r_distance == 0.0);

    CoverageReport degenerate;
    degenerate.n_n = 10;
    degenerate.n_h = 10;
    CHECK_THROWS_AS(reward(degenerate, still), Error);
}

TEST_CASE("action clamping and bounds") {
    Action wild{2.0, -9.0, 0.1, 0.2};
    CHECK_FALSE(wild.inBounds());
    Action c = wild.clamped();
    CHECK(c.gx == 0.44);
    CHECK(c.gy == -1.05);
    CHECK(c.inBounds());
    CHECK(Action{0.44, 1.05, -0.44, -1.05}.inBounds());
}

TEST_CASE("blanket randomization stays inside the sampling boxes") {
    EnvConfig cfg;
    cfg.vary_blanket = true;
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        BlanketPose p = randomizeBlanket(cfg, rng);
        CHECK(p.x >= -0.02);
        CHECK(p.x <= 0.02);
        CHECK(p.y >= -0.25);
        CHECK(p.y <= 0.05);
        CHECK(std::abs(p.yaw) <= 3.14159265358979 / 4.0);
    }
    cfg.vary_blanket = false;
    BlanketPose p = randomizeBlanket(cfg, rng);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.yaw == 0.0);
}

TEST_CASE("reset satisfies the coverage contract and is deterministic") {
    EnvConfig cfg;
    Env env(cfg);
    const EnvState& st = env.reset(77);
    CHECK(st.reset_attempts >= 1);
    CHECK(st.reset_attempts <= cfg.reset_retries);

    CoverageReport rep = coverageReport(st.partition, st.cloud, st.cloth, cfg.lambda);
    double nonhead = rep.n_t + rep.n_n;
    CHECK(1.0 - (rep.rho_t + rep.rho_n) / nonhead >= 0.99);
    CHECK(1.0 - double(rep.rho_h) / rep.n_h >= 0.90);

    // observation invariants
    for (int i = 0; i < 4; ++i) {
        double x = st.observation[3 * i], y = st.observation[3 * i + 1],
               th = st.observation[3 * i + 2];
        CHECK(std::abs(x) <= cfg.bed.half_x + 0.10);
        CHECK(std::abs(y) <= cfg.bed.half_y + 0.10);
        CHECK(th > -3.14159265358980);
        CHECK(th <= 3.14159265358980);
    }

    Observation obs1 = st.observation;
    std::vector<Vec3> pos1 = st.cloth.positions;
    Env env2(cfg);
    const EnvState& st2 = env2.reset(77);
    for (int i = 0; i < 12; ++i) CHECK(obs1[i] == st2.observation[i]);
    for (std::size_t i = 0; i < pos1.size(); ++i) {
        CHECK(pos1[i].x == st2.cloth.positions[i].x);
        CHECK(pos1[i].y == st2.cloth.positions[i].y);
        CHECK(pos1[i].z == st2.cloth.positions[i].z);
    }
}

TEST_CASE("execute runs an episode from an untouched snapshot") {
    EnvConfig cfg;
    Env env(cfg);
    const EnvState& st = env.reset(5);
    std::vector<Vec3> snapshot = st.cloth.positions;

    // in-place lift and drop keeps the head clear
    Action inplace{0.0, 0.3, 0.0, 0.3};
    EpisodeOutcome out = env.execute(inplace);
    CHECK_FALSE(out.clamped);
    CHECK(out.report.rho_h == 0);
    CHECK(out.anchored_vertex >= 0);

    // snapshot untouched, so a second action starts from the same state
    for (std::size_t i = 0; i < snapshot.size(); ++i)
        CHECK(snapshot[i].z == env.state().cloth.positions[i].z);

    EpisodeOutcome again = env.execute(inplace);
    CHECK(again.reward.total == out.reward.total);
    CHECK(again.report.rho_t == out.report.rho_t);

    // out-of-bounds request is clamped and flagged
    EpisodeOutcome clamped = env.execute({9, 9, -9, -9});
    CHECK(clamped.clamped);
    CHECK(clamped.executed.inBounds());
}

TEST_CASE("execute before reset is an invalid state") {
    Env env{EnvConfig{}};
    CHECK_FALSE(env.hasState());
    CHECK_THROWS_AS(env.execute({0, 0, 0, 0}), Error);
}

TEST_CASE("randomized blanket resets still cover the body") {
    EnvConfig cfg;
    cfg.vary_blanket = true;
    Env env(cfg);
    const EnvState& st = env.reset(11);
    CoverageReport rep = coverageReport(st.partition, st.cloud, st.cloth, cfg.lambda);
    double nonhead = rep.n_t + rep.n_n;
    CHECK(1.0 - (rep.rho_t + rep.rho_n) / nonhead >= 0.99);
}
