#pragma once

#include "bray/errors.hpp"
#include "bray/vec3.hpp"

namespace bray {

// Convex domain: the open ball of given center and radius. A ball keeps every
// chord computation closed form and has the smooth boundary the ray limits
// require, unlike a box.
class Domain {
public:
    Domain(const Vec3& center, double radius);

    const Vec3& center() const { return center_; }
    double radius() const { return radius_; }
    double diameter() const { return 2.0 * radius_; }

    // Points closer to the boundary than interior_margin() count as boundary:
    // chords from there are too short for stable attenuation ratios.
    double interior_margin() const { return 1e-7 * radius_; }
    bool is_interior(const Vec3& x) const;
    // In the closed domain, with a small tolerance for boundary points produced
    // by ray-sphere intersection.
    bool contains(const Vec3& x) const;

    Vec3 outward_normal(const Vec3& boundary_point) const;
    // Projects onto the sphere; used to snap ray-sphere roots to the boundary.
    Vec3 snap_to_boundary(const Vec3& near_boundary) const;

private:
    Vec3 center_;
    double radius_;
};

// Unit vector; the constructor normalizes and rejects near-zero input.
class Direction {
public:
    explicit Direction(const Vec3& v);
    Direction(double x, double y, double z) : Direction(Vec3{x, y, z}) {}

    const Vec3& vec() const { return v_; }
    Direction reversed() const;

private:
    Vec3 v_;
};

enum class BoundarySide { Inflow, Outflow };

// A point of the boundary manifolds: inflow if the outward normal and the
// direction oppose, outflow if they agree. Tangential pairs are rejected.
struct BoundaryPoint {
    Vec3 position;
    Direction direction;
    BoundarySide side;

    static BoundaryPoint classify(const Domain& dom, const Vec3& position, const Direction& dir);
};

// The four boundary feet of the two chords through x along zeta and eta:
// a, b upstream (inflow), c, d downstream (outflow).
struct RayConstruction {
    Vec3 x;
    Direction zeta;
    Direction eta;
    Vec3 a, b, c, d;

    double chord_zeta() const { return norm(c - a); }
    double chord_eta() const { return norm(d - b); }
};

// First boundary point on the ray from x in direction +theta (resp. -theta).
// x must be strictly interior.
Vec3 boundary_exit(const Domain& dom, const Vec3& x, const Direction& theta);
Vec3 boundary_entry(const Domain& dom, const Vec3& x, const Direction& theta);

// Distance from x (anywhere in the closed ball) to the boundary along dir;
// zero for a boundary point heading outward. Tolerant counterpart of
// boundary_exit for integrals that start on the boundary itself.
double exit_distance(const Domain& dom, const Vec3& x, const Vec3& unit_dir);

// Rejects |zeta . eta| >= 1 - 1e-9: coincident chords have no isolated
// crossing point and the reconstruction ratio is meaningless there.
RayConstruction construct_rays(const Domain& dom, const Vec3& x, const Direction& zeta,
                               const Direction& eta);

}  // namespace bray
