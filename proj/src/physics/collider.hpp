#pragma once

#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/vec3.hpp"

namespace bedsim {

struct Capsule {
    Vec3 a;             // axis endpoint (m)
    Vec3 b;             // axis endpoint (m)
    double radius = 0;  // m
    std::string label;

    Capsule() = default;
    Capsule(const Vec3& a_, const Vec3& b_, double r, std::string label_)
        : a(a_), b(b_), radius(r), label(std::move(label_)) {
        requireArg(radius > 0.0, "capsule radius must be > 0");
    }

    Vec3 closestAxisPoint(const Vec3& p) const {
        Vec3 ab = b - a;
        double denom = norm2(ab);
        if (denom <= 0.0) return a;
        double t = dot(p - a, ab) / denom;
        t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
        return a + t * ab;
    }

    double surfaceDistance(const Vec3& p) const { return norm(p - closestAxisPoint(p)) - radius; }

    bool contains(const Vec3& p, double slack = 0.0) const { return surfaceDistance(p) < slack; }
};

// Horizontal bed surface with a rectangular extent centered on the origin.
// Cloth hanging past the extent drapes over the edge and is caught by the floor.
struct BedPlane {
    double height = 0.6;   // m, top surface
    double half_x = 0.44;  // default 0.88 m x 2.1 m
    double half_y = 1.05;

    bool inExtent(const Vec3& p) const {
        return p.x >= -half_x && p.x <= half_x && p.y >= -half_y && p.y <= half_y;
    }
};

struct ColliderSet {
    BedPlane bed;
    double floor_height = 0.0;
    std::vector<Capsule> capsules;
};

}  // namespace bedsim
