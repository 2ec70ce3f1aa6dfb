#include "physics/cloth.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace bedsim {

void ClothParams::validate() const {
    requireArg(total_mass > 0.0, "cloth total_mass must be > 0");
    requireArg(stiffness_structural > 0.0 && stiffness_shear > 0.0 && stiffness_bend > 0.0,
               "spring stiffnesses must be > 0");
    requireArg(damping > 0.0, "damping must be > 0");
    requireArg(velocity_damping >= 0.0 && velocity_damping < 1.0, "velocity_damping must be in [0, 1)");
    requireArg(dt > 0.0, "dt must be > 0");
    requireArg(collision_margin >= 0.0, "collision_margin must be >= 0");
    requireArg(strain_limit >= 1.0, "strain_limit must be >= 1");
}

ClothMesh buildCloth(const ClothParams& params, double width, double height,
                     int rows, int cols, const Vec3& center) {
    params.validate();
    requireArg(width > 0.0 && height > 0.0, "cloth dimensions must be > 0");
    requireArg(rows >= 2 && cols >= 2, "cloth grid needs at least 2x2 vertices");

    ClothMesh cloth;
    cloth.rows = rows;
    cloth.cols = cols;
    cloth.positions.reserve(std::size_t(rows) * cols);
    const double dx = width / (cols - 1);
    const double dy = height / (rows - 1);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            cloth.positions.push_back({center.x - width / 2 + c * dx,
                                       center.y - height / 2 + r * dy,
                                       center.z});
        }
    }
    cloth.velocities.assign(cloth.positions.size(), Vec3{});
    cloth.per_vertex_mass = params.total_mass / double(rows * cols);

    auto add = [&](int r0, int c0, int r1, int c1, SpringClass cls) {
        if (r1 < 0 || r1 >= rows || c1 < 0 || c1 >= cols) return;
        int a = r0 * cols + c0;
        int b = r1 * cols + c1;
        double rest = norm(cloth.positions[b] - cloth.positions[a]);
        cloth.springs.push_back({a, b, rest, cls});
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            add(r, c, r, c + 1, SpringClass::Structural);
            add(r, c, r + 1, c, SpringClass::Structural);
            add(r, c, r + 1, c + 1, SpringClass::Shear);
            add(r, c, r + 1, c - 1, SpringClass::Shear);
            add(r, c, r, c + 2, SpringClass::Bend);
            add(r, c, r + 2, c, SpringClass::Bend);
        }
    }
    return cloth;
}

void accumulateInternalForces(const ClothMesh& cloth, const ClothParams& params,
                              std::vector<Vec3>& out) {
    out.assign(cloth.positions.size(), Vec3{});
    const double ks[3] = {params.stiffness_structural, params.stiffness_shear,
                          params.stiffness_bend};
    for (const Spring& s : cloth.springs) {
        Vec3 d = cloth.positions[s.b] - cloth.positions[s.a];
        double len = norm(d);
        if (len <= 1e-12) continue;
        Vec3 dir = d * (1.0 / len);
        double f = ks[int(s.cls)] * (len - s.rest);
        double rel = dot(cloth.velocities[s.b] - cloth.velocities[s.a], dir);
        f += params.damping * rel;
        Vec3 force = dir * f;
        out[s.a] += force;
        out[s.b] -= force;
    }
}

namespace {

struct CapsuleBounds {
    double min_x, max_x, min_y, max_y, min_z, max_z;
};

void applyContact(Vec3& v, const Vec3& n, double friction) {
    double vn = dot(v, n);
    if (vn >= 0.0) return;
    v -= n * vn;  // kill approach velocity
    Vec3 vt = v - n * dot(v, n);
    double vt_mag = norm(vt);
    if (vt_mag > 1e-12) {
        double scale = 1.0 - friction * (-vn) / vt_mag;
        scale = std::clamp(scale, 0.0, 1.0);
        v = n * dot(v, n) + vt * scale;
    }
}

}  // namespace

void step(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params) {
    const int n = cloth.vertexCount();
    const double dt = params.dt;
    const double inv_m = 1.0 / cloth.per_vertex_mass;
    const double ks[3] = {params.stiffness_structural, params.stiffness_shear,
                          params.stiffness_bend};

    // spring + damping forces, then gravity, integrated into velocity
    static thread_local std::vector<Vec3> forces;
    forces.assign(std::size_t(n), Vec3{});
    for (const Spring& s : cloth.springs) {
        Vec3 d = cloth.positions[s.b] - cloth.positions[s.a];
        double len = norm(d);
        if (len <= 1e-12) continue;
        Vec3 dir = d * (1.0 / len);
        double f = ks[int(s.cls)] * (len - s.rest);
        f += params.damping * dot(cloth.velocities[s.b] - cloth.velocities[s.a], dir);
        Vec3 force = dir * f;
        forces[s.a] += force;
        forces[s.b] -= force;
    }
    const double clamp2 = params.velocity_clamp * params.velocity_clamp;
    const double drag = std::clamp(1.0 - params.velocity_damping, 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        Vec3& v = cloth.velocities[i];
        v += forces[i] * (inv_m * dt);
        v.z -= params.gravity * dt;
        v *= drag;
        double sp2 = norm2(v);
        if (sp2 > clamp2) v *= params.velocity_clamp / std::sqrt(sp2);
        cloth.positions[i] += v * dt;
    }

    // strain limiting: project springs that stretched past the limit, tracking
    // the position change so momentum stays consistent
    static thread_local std::vector<Vec3> pre;
    pre = cloth.positions;
    const double inv_dt = 1.0 / dt;
    for (int it = 0; it < params.strain_iterations; ++it) {
        for (const Spring& s : cloth.springs) {
            if (s.cls == SpringClass::Bend) continue;
            Vec3 d = cloth.positions[s.b] - cloth.positions[s.a];
            double len = norm(d);
            double max_len = s.rest * params.strain_limit;
            if (len <= max_len || len <= 1e-12) continue;
            Vec3 corr = d * ((len - max_len) / len);
            bool fa = !cloth.anchors.count(s.a);
            bool fb = !cloth.anchors.count(s.b);
            if (fa && fb) {
                cloth.positions[s.a] += corr * 0.5;
                cloth.positions[s.b] -= corr * 0.5;
            } else if (fa) {
                cloth.positions[s.a] += corr;
            } else if (fb) {
                cloth.positions[s.b] -= corr;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        cloth.velocities[i] += (cloth.positions[i] - pre[i]) * inv_dt;
    }

    // collision projection; two passes so pushing out of one collider cannot
    // leave a vertex inside another
    static thread_local std::vector<CapsuleBounds> bounds;
    bounds.clear();
    const double margin = params.collision_margin;
    for (const Capsule& cap : colliders.capsules) {
        double r = cap.radius + margin;
        bounds.push_back({std::min(cap.a.x, cap.b.x) - r, std::max(cap.a.x, cap.b.x) + r,
                          std::min(cap.a.y, cap.b.y) - r, std::max(cap.a.y, cap.b.y) + r,
                          std::min(cap.a.z, cap.b.z) - r, std::max(cap.a.z, cap.b.z) + r});
    }
    const BedPlane& bed = colliders.bed;
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < n; ++i) {
            Vec3& p = cloth.positions[i];
            Vec3& v = cloth.velocities[i];
            for (std::size_t c = 0; c < bounds.size(); ++c) {
                const CapsuleBounds& bb = bounds[c];
                if (p.x < bb.min_x || p.x > bb.max_x || p.y < bb.min_y || p.y > bb.max_y ||
                    p.z < bb.min_z || p.z > bb.max_z)
                    continue;
                const Capsule& cap = colliders.capsules[c];
                Vec3 axis_pt = cap.closestAxisPoint(p);
                Vec3 d = p - axis_pt;
                double dist = norm(d);
                double want = cap.radius + margin;
                if (dist >= want) continue;
                Vec3 nrm = dist > 1e-9 ? d * (1.0 / dist) : Vec3{0, 0, 1};
                p = axis_pt + nrm * want;
                applyContact(v, nrm, params.friction_coeff);
            }
            // the bed is a box: resolve along the least-penetrated face so
            // overhanging cloth rests against the sides instead of jittering
            // across the top edge
            double pen_x = bed.half_x + margin - std::abs(p.x);
            double pen_y = bed.half_y + margin - std::abs(p.y);
            double pen_z = bed.height + margin - p.z;
            if (pen_x > 0 && pen_y > 0 && pen_z > 0) {
                if (pen_z <= pen_x && pen_z <= pen_y) {
                    p.z = bed.height + margin;
                    applyContact(v, {0, 0, 1}, params.friction_coeff);
                } else if (pen_x <= pen_y) {
                    double sx = p.x < 0 ? -1.0 : 1.0;
                    p.x = sx * (bed.half_x + margin);
                    applyContact(v, {sx, 0, 0}, params.friction_coeff);
                } else {
                    double sy = p.y < 0 ? -1.0 : 1.0;
                    p.y = sy * (bed.half_y + margin);
                    applyContact(v, {0, sy, 0}, params.friction_coeff);
                }
            }
            if (p.z < colliders.floor_height + margin) {
                p.z = colliders.floor_height + margin;
                applyContact(v, {0, 0, 1}, params.friction_coeff);
            }
        }
    }

    for (const auto& [id, target] : cloth.anchors) {
        cloth.positions[id] = target;
        cloth.velocities[id] = Vec3{};
    }
    cloth.time += dt;
}

double maxSpeed(const ClothMesh& cloth) {
    double best = 0.0;
    for (const Vec3& v : cloth.velocities) best = std::max(best, norm2(v));
    return std::sqrt(best);
}

SettleResult settle(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params,
                    double v_thresh, int max_steps, const FrameCallback& on_frame) {
    requireArg(v_thresh > 0.0, "settle v_thresh must be > 0");
    requireArg(max_steps > 0, "settle max_steps must be > 0");
    for (int i = 0; i < max_steps; ++i) {
        step(cloth, colliders, params);
        if (on_frame) on_frame(cloth);
        if (maxSpeed(cloth) < v_thresh) return {i + 1, true};
    }
    return {max_steps, false};
}

void anchor(ClothMesh& cloth, int vertex_id) {
    requireArg(vertex_id >= 0 && vertex_id < cloth.vertexCount(),
               "anchor vertex id out of range");
    cloth.anchors[vertex_id] = cloth.positions[vertex_id];
}

void releaseAnchors(ClothMesh& cloth) { cloth.anchors.clear(); }

void transportAnchors(ClothMesh& cloth, const ColliderSet& colliders, const ClothParams& params,
                      const std::vector<Vec3>& waypoints, double speed,
                      const FrameCallback& on_frame) {
    requireState(!cloth.anchors.empty(), "transport requires at least one anchor");
    requireArg(speed > 0.0, "transport speed must be > 0");
    const double inc = speed * params.dt;
    Vec3 cur = cloth.anchors.begin()->second;
    auto shift = [&](const Vec3& delta) {
        for (auto& [id, target] : cloth.anchors) target += delta;
        cur += delta;
        step(cloth, colliders, params);
        if (on_frame) on_frame(cloth);
    };
    for (const Vec3& wp : waypoints) {
        double remaining = norm(wp - cur);
        while (remaining > inc) {
            shift(normalized(wp - cur) * inc);
            remaining = norm(wp - cur);
        }
        if (remaining > 1e-12) shift(wp - cur);
    }
}

}  // namespace bedsim
