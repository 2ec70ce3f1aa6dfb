#include <cmath>

#include "core/error.hpp"
#include "doctest.h"
#include "physics/cloth.hpp"
#include "core/rng.hpp"

using namespace bedsim;

namespace {

ColliderSet bedOnly() {
    ColliderSet c;
    c.floor_height = 0.0;
    return c;
}

ClothMesh smallCloth(const ClothParams& p, double z, int rows = 9, int cols = 9) {
    return buildCloth(p, 0.4, 0.4, rows, cols, {0, 0, z});
}

double maxInternalForceNorm(const ClothMesh& cloth, const ClothParams& p) {
    std::vector<Vec3> f;
    accumulateInternalForces(cloth, p, f);
    Vec3 sum{};
    for (const Vec3& v : f) sum = sum + v;
    return norm(sum);
}

}  // namespace

TEST_CASE("parameter validation") {
    ClothParams p;
    CHECK_NOTHROW(p.validate());
    p.dt = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = ClothParams{};
    p.velocity_damping = 1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("free fall matches Newton for one step") {
    ClothParams p;
    p.velocity_damping = 0.0;  // isolate gravity; the global damping term is a
                               // separate, deliberately lossy effect
    ClothMesh cloth = smallCloth(p, 2.0);
    ColliderSet none = bedOnly();
    none.bed.height = -100.0;  // out of reach
    ClothMesh before = cloth;
    step(cloth, none, p);
    for (int i = 0; i < cloth.vertexCount(); ++i) {
        CHECK(cloth.velocities[i].z == doctest::Approx(-p.gravity * p.dt).epsilon(1e-12));
        CHECK(cloth.velocities[i].x == 0.0);
        CHECK(before.positions[i].z - cloth.positions[i].z ==
              doctest::Approx(p.gravity * p.dt * p.dt).epsilon(1e-9));
    }
}

TEST_CASE("stretched spring pulls both ends equally and oppositely") {
    ClothParams p;
    ClothMesh cloth;
    cloth.rows = 1;
    cloth.cols = 2;
    cloth.positions = {{0, 0, 0}, {0.15, 0, 0}};  // rest 0.1, stretched by 0.05
    cloth.velocities = {{}, {}};
    cloth.springs = {{0, 1, 0.1, SpringClass::Structural}};
    cloth.per_vertex_mass = 0.01;
    std::vector<Vec3> f;
    accumulateInternalForces(cloth, p, f);
    double expected = p.stiffness_structural * 0.05;
    CHECK(f[0].x == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f[1].x == doctest::Approx(-expected).epsilon(1e-12));
    CHECK(f[0].y == 0.0);
    CHECK(f[0].z == 0.0);
}

TEST_CASE("penetrating vertex is projected back above the bed") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh cloth = smallCloth(p, col.bed.height - 0.01);  // 1 cm below
    step(cloth, col, p);
    for (const Vec3& v : cloth.positions) CHECK(v.z >= col.bed.height);
}

TEST_CASE("internal forces sum to zero for random cloth states") {
    ClothParams p;
    Rng rng(99);
    ClothMesh cloth = smallCloth(p, 1.0);
    for (auto& v : cloth.positions)
        v = v + Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                     rng.uniform(-0.05, 0.05));
    for (auto& v : cloth.velocities)
        v = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(maxInternalForceNorm(cloth, p) < 1e-9);
}

TEST_CASE("settle terminates fast when already at rest") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh cloth = smallCloth(p, col.bed.height + p.collision_margin);
    SettleResult r = settle(cloth, col, p, 0.01, 2000);
    CHECK(r.settled);
    CHECK(r.steps <= 20);
}

TEST_CASE("flat drop from 10 cm settles onto the bed surface") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh cloth = smallCloth(p, col.bed.height + 0.10, 15, 15);
    SettleResult r = settle(cloth, col, p, 0.01, 4000);
    CHECK(r.settled);
    for (const Vec3& v : cloth.positions) {
        CHECK(v.z >= col.bed.height - 1e-9);
        CHECK(v.z <= col.bed.height + p.collision_margin + 0.001);
    }
    // kinetic energy bound after settling
    double ke = 0.0;
    for (const Vec3& v : cloth.velocities) ke += 0.5 * cloth.per_vertex_mass * norm2(v);
    CHECK(ke < 0.5 * p.total_mass * 0.01 * 0.01);
}

TEST_CASE("anchors pin vertices exactly") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh cloth = smallCloth(p, col.bed.height + 0.3);
    Vec3 start = cloth.positions[0];
    anchor(cloth, 0);
    anchor(cloth, 0);  // idempotent
    CHECK(cloth.anchors.size() == 1);
    for (int i = 0; i < 50; ++i) step(cloth, col, p);
    CHECK(norm(cloth.positions[0] - start) < 1e-9);
    CHECK(cloth.positions[cloth.vertexCount() - 1].z < start.z);  // rest sagged

    CHECK_THROWS_AS(anchor(cloth, cloth.vertexCount()), Error);

    releaseAnchors(cloth);
    settle(cloth, col, p, 0.01, 4000);
    CHECK(cloth.positions[0].z < start.z - 0.05);  // fell once released
}

TEST_CASE("anchor transport follows the waypoint path") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh cloth = smallCloth(p, col.bed.height + p.collision_margin);
    anchor(cloth, 0);
    Vec3 start = cloth.positions[0];

    SUBCASE("no-op waypoint") {
        transportAnchors(cloth, col, p, {start}, 0.4);
        CHECK(norm(cloth.positions[0] - start) < 1e-12);
    }
    SUBCASE("vertical lift of 0.4 m") {
        transportAnchors(cloth, col, p, {start + Vec3{0, 0, 0.4}}, 0.4);
        CHECK(cloth.positions[0].z ==
              doctest::Approx(start.z + 0.4).epsilon(1e-9));
        CHECK(cloth.positions[0].x == doctest::Approx(start.x).epsilon(1e-12));
    }
    SUBCASE("no anchors is an error") {
        releaseAnchors(cloth);
        CHECK_THROWS_AS(transportAnchors(cloth, col, p, {start}, 0.4), Error);
    }
}

TEST_CASE("stepping is deterministic") {
    ClothParams p;
    ColliderSet col = bedOnly();
    ClothMesh a = smallCloth(p, col.bed.height + 0.1);
    ClothMesh b = a;
    for (int i = 0; i < 200; ++i) {
        step(a, col, p);
        step(b, col, p);
    }
    for (int i = 0; i < a.vertexCount(); ++i) {
        CHECK(a.positions[i].x == b.positions[i].x);
        CHECK(a.positions[i].y == b.positions[i].y);
        CHECK(a.positions[i].z == b.positions[i].z);
    }
}

TEST_CASE("collision soundness around a capsule") {
    ClothParams p;
    ColliderSet col = bedOnly();
    col.capsules.push_back(
        Capsule({-0.1, 0, col.bed.height + 0.08}, {0.1, 0, col.bed.height + 0.08}, 0.06,
                "obstacle"));
    ClothMesh cloth = smallCloth(p, col.bed.height + 0.25, 15, 15);
    settle(cloth, col, p, 0.01, 3000);
    for (const Vec3& v : cloth.positions) {
        CHECK(v.z >= col.bed.height - 1e-9);
        CHECK(col.capsules[0].surfaceDistance(v) > -1e-6);
    }
}
