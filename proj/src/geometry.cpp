#include "bray/geometry.hpp"

#include <cmath>
#include <sstream>

namespace bray {

namespace {

std::string fmt_point(const Vec3& v) {
    std::ostringstream os;
    os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
    return os.str();
}

}  // namespace

Domain::Domain(const Vec3& center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        fail(ErrorCode::DomainViolation, "domain radius must be positive");
}

bool Domain::is_interior(const Vec3& x) const {
    return norm(x - center_) < radius_ - interior_margin();
}

bool Domain::contains(const Vec3& x) const {
    return norm(x - center_) <= radius_ * (1.0 + 1e-9);
}

Vec3 Domain::outward_normal(const Vec3& p) const { return normalized(p - center_); }

Vec3 Domain::snap_to_boundary(const Vec3& p) const {
    return center_ + normalized(p - center_) * radius_;
}

Direction::Direction(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 1e-14) || !std::isfinite(n))
        fail(ErrorCode::DegenerateGeometry, "direction must be a nonzero vector");
    v_ = v / n;
}

Direction Direction::reversed() const {
    Direction d = *this;
    d.v_ = -d.v_;
    return d;
}

BoundaryPoint BoundaryPoint::classify(const Domain& dom, const Vec3& position,
                                      const Direction& dir) {
    const double off = std::abs(norm(position - dom.center()) - dom.radius());
    if (off > 1e-9)
        fail(ErrorCode::DomainViolation,
             "point " + fmt_point(position) + " is not on the boundary (offset " +
                 std::to_string(off) + ")");
    const double nd = dot(dom.outward_normal(position), dir.vec());
    if (std::abs(nd) <= 1e-12)
        fail(ErrorCode::DegenerateGeometry, "tangential boundary direction");
    return BoundaryPoint{position, dir, nd < 0.0 ? BoundarySide::Inflow : BoundarySide::Outflow};
}

Vec3 boundary_exit(const Domain& dom, const Vec3& x, const Direction& theta) {
    if (!dom.is_interior(x))
        fail(ErrorCode::DomainViolation,
             "ray base point " + fmt_point(x) + " is not strictly inside the domain");
    // |x + t theta - center|^2 = R^2, take the positive root.
    const Vec3 rel = x - dom.center();
    const double b = dot(theta.vec(), rel);
    const double c = norm2(rel) - dom.radius() * dom.radius();
    const double disc = b * b - c;  // c < 0 inside, so disc > 0
    const double t = -b + std::sqrt(disc);
    return dom.snap_to_boundary(x + theta.vec() * t);
}

Vec3 boundary_entry(const Domain& dom, const Vec3& x, const Direction& theta) {
    return boundary_exit(dom, x, theta.reversed());
}

double exit_distance(const Domain& dom, const Vec3& x, const Vec3& unit_dir) {
    const Vec3 rel = x - dom.center();
    const double b = dot(unit_dir, rel);
    const double c = norm2(rel) - dom.radius() * dom.radius();
    const double disc = b * b - c;
    if (disc <= 0.0) return 0.0;  // on the boundary, tangential
    return std::max(0.0, -b + std::sqrt(disc));
}

RayConstruction construct_rays(const Domain& dom, const Vec3& x, const Direction& zeta,
                               const Direction& eta) {
    const double align = std::abs(dot(zeta.vec(), eta.vec()));
    if (align >= 1.0 - 1e-9)
        fail(ErrorCode::DegenerateGeometry,
             "zeta and eta are parallel: the two chords coincide and the crossing point is not "
             "isolated");
    RayConstruction rc{x, zeta, eta, {}, {}, {}, {}};
    rc.a = boundary_entry(dom, x, zeta);
    rc.b = boundary_entry(dom, x, eta);
    rc.c = boundary_exit(dom, x, zeta);
    rc.d = boundary_exit(dom, x, eta);
    return rc;
}

}  // namespace bray
