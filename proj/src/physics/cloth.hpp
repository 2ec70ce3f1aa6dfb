#pragma once

#include <functional>
#include <map>
#include <vector>

#include "core/vec3.hpp"
#include "physics/collider.hpp"

namespace bedsim {

enum class SpringClass { Structural, Shear, Bend };

struct Spring {
    int a = 0;
    int b = 0;
    double rest = 0;  // m
    SpringClass cls = SpringClass::Structural;
};

struct ClothParams {
    double total_mass = 0.7;             // kg
    double stiffness_structural = 2.5;   // N/m
    double stiffness_shear = 1.2;        // N/m
    double stiffness_bend = 0.6;         // N/m
    double damping = 0.004;              // N*s/m, along-spring relative velocity
    double velocity_damping = 0.05;              // per-step velocity fraction lost
    double friction_coeff = 0.4;
    double gravity = 9.81;               // m/s^2, acts along -z
    double dt = 0.005;                   // s
    double collision_margin = 0.002;     // m
    double velocity_clamp = 5.0;         // m/s, per-step safety cap
    double strain_limit = 1.06;          // max spring elongation ratio
    int strain_iterations = 4;

    void validate() const;
};

// Grid of mass particles joined by structural/shear/bend springs. Vertices are
// stored row-major: index = row * cols + col, columns along x, rows along y.
struct ClothMesh {
    int rows = 0;
    int cols = 0;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<Spring> springs;
    double per_vertex_mass = 0;       // kg
    std::map<int, Vec3> anchors;      // vertex id -> target position
    double time = 0;                  // s, advanced by step()

    int vertexCount() const { return int(positions.size()); }
};

using FrameCallback = std::function<void(const ClothMesh&)>;

ClothMesh buildCloth(const ClothParams& params, double width, double height,
                     int rows, int cols, const Vec3& center = {0, 0, 0});

// Spring + damping forces only (no gravity); used by the force-balance checks.
void accumulateInternalForces(const ClothMesh& cloth, const ClothParams& params,
                              std::vector<Vec3>& out);

// One semi-implicit Euler step: forces, integrate, strain limiting, collision
// projection with Coulomb-style tangential friction, anchor snapping.
void step(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params);

double maxSpeed(const ClothMesh& cloth);

struct SettleResult {
    int steps = 0;
    bool settled = false;
};

SettleResult settle(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params,
                    double v_thresh = 0.01, int max_steps = 2000,
                    const FrameCallback& on_frame = {});

void anchor(ClothMesh& cloth, int vertex_id);
void releaseAnchors(ClothMesh& cloth);

// Moves all anchor targets along the piecewise-linear path through `waypoints`
// (starting from the lowest-index anchor's current target) at `speed`, one
// physics step per increment.
void transportAnchors(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params,
                      const std::vector<Vec3>& waypoints, double speed,
                      const FrameCallback& on_frame = {});

}  // namespace bedsim
