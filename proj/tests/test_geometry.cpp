#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bray/geometry.hpp"
#include "helpers.hpp"

using namespace bray;

namespace {
const Domain unit_ball{{0, 0, 0}, 1.0};

bool close(const Vec3& a, const Vec3& b, double tol = 1e-12) { return norm(a - b) <= tol; }
}  // namespace

TEST_CASE("boundary exit on the unit ball") {
    CHECK(close(boundary_exit(unit_ball, {0, 0, 0}, Direction(1, 0, 0)), {1, 0, 0}));
    CHECK(close(boundary_exit(unit_ball, {0.5, 0, 0}, Direction(1, 0, 0)), {1, 0, 0}));
    // x^2 + y^2 = 1 with x = 0.5
    CHECK(close(boundary_exit(unit_ball, {0.5, 0, 0}, Direction(0, 1, 0)),
                {0.5, std::sqrt(0.75), 0}));
    // chord remainder from (0.5,0,0) to (1,0,0)
    CHECK(norm(boundary_exit(unit_ball, {0.5, 0, 0}, Direction(1, 0, 0)) - Vec3{0.5, 0, 0}) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("boundary entry mirrors exit") {
    CHECK(close(boundary_entry(unit_ball, {0, 0, 0}, Direction(1, 0, 0)), {-1, 0, 0}));
    CHECK(close(boundary_entry(unit_ball, {0.5, 0, 0}, Direction(1, 0, 0)), {-1, 0, 0}));
    CHECK(close(boundary_entry(unit_ball, {0.5, 0, 0}, Direction(0, 1, 0)),
                {0.5, -std::sqrt(0.75), 0}));
}

TEST_CASE("points outside or on the boundary are rejected") {
    CHECK_THROWS_AS(boundary_exit(unit_ball, {2, 0, 0}, Direction(1, 0, 0)), Error);
    CHECK_THROWS_AS(boundary_exit(unit_ball, {1, 0, 0}, Direction(1, 0, 0)), Error);
    // within the interior margin of the boundary counts as boundary
    CHECK_THROWS_AS(boundary_exit(unit_ball, {1.0 - 1e-9, 0, 0}, Direction(1, 0, 0)), Error);
}

TEST_CASE("ray construction, symmetric case") {
    const auto rc = construct_rays(unit_ball, {0, 0, 0}, Direction(1, 0, 0), Direction(0, 1, 0));
    CHECK(close(rc.a, {-1, 0, 0}));
    CHECK(close(rc.b, {0, -1, 0}));
    CHECK(close(rc.c, {1, 0, 0}));
    CHECK(close(rc.d, {0, 1, 0}));
}

TEST_CASE("ray construction, off-center point") {
    // ray-sphere roots by hand: entry/exit along e1 fix y=0.1, along e2 fix x=0.2
    const auto rc =
        construct_rays(unit_ball, {0.2, 0.1, 0}, Direction(1, 0, 0), Direction(0, 1, 0));
    CHECK(close(rc.a, {-std::sqrt(1.0 - 0.01), 0.1, 0}, 1e-12));
    CHECK(close(rc.c, {std::sqrt(1.0 - 0.01), 0.1, 0}, 1e-12));
    CHECK(close(rc.b, {0.2, -std::sqrt(1.0 - 0.04), 0}, 1e-12));
    CHECK(close(rc.d, {0.2, std::sqrt(1.0 - 0.04), 0}, 1e-12));
}

TEST_CASE("parallel directions are degenerate") {
    CHECK_THROWS_AS(construct_rays(unit_ball, {0, 0, 0}, Direction(1, 0, 0), Direction(1, 0, 0)),
                    Error);
    CHECK_THROWS_AS(construct_rays(unit_ball, {0.3, 0, 0}, Direction(1, 0, 0), Direction(-1, 0, 0)),
                    Error);
}

TEST_CASE("boundary point classification") {
    const auto in
        = BoundaryPoint::classify(unit_ball, {-1, 0, 0}, Direction(1, 0, 0));
    CHECK(in.side == BoundarySide::Inflow);
    const auto out = BoundaryPoint::classify(unit_ball, {1, 0, 0}, Direction(1, 0, 0));
    CHECK(out.side == BoundarySide::Outflow);
    CHECK_THROWS_AS(BoundaryPoint::classify(unit_ball, {1, 0, 0}, Direction(0, 1, 0)), Error);
    CHECK_THROWS_AS(BoundaryPoint::classify(unit_ball, {0.5, 0, 0}, Direction(1, 0, 0)), Error);
}

TEST_CASE("entry, point and exit are collinear and ordered; exit sits on the sphere") {
    braytest::Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 0.999);
        const Direction theta(rng.unit_vector());
        const Vec3 entry = boundary_entry(unit_ball, x, theta);
        const Vec3 exit = boundary_exit(unit_ball, x, theta);
        CHECK(std::abs(norm(exit) - 1.0) <= 1e-9);
        CHECK(std::abs(norm(entry) - 1.0) <= 1e-9);
        // ordered along theta: exit - x and x - entry both along +theta
        CHECK(dot(exit - x, theta.vec()) > 0.0);
        CHECK(dot(x - entry, theta.vec()) > 0.0);
        // collinear: cross products vanish
        CHECK(norm(cross(exit - entry, theta.vec())) <= 1e-9);
        // chord never exceeds the diameter
        CHECK(norm(exit - entry) <= 2.0 + 1e-12);
    }
}

TEST_CASE("chord equals the diameter only through the center") {
    const Vec3 entry = boundary_entry(unit_ball, {0, 0, 0}, Direction(0.3, -0.4, 0.86));
    const Vec3 exit = boundary_exit(unit_ball, {0, 0, 0}, Direction(0.3, -0.4, 0.86));
    CHECK(norm(exit - entry) == doctest::Approx(2.0).epsilon(1e-12));
    const Vec3 e2 = boundary_exit(unit_ball, {0.4, 0, 0}, Direction(0, 1, 0));
    const Vec3 a2 = boundary_entry(unit_ball, {0.4, 0, 0}, Direction(0, 1, 0));
    CHECK(norm(e2 - a2) < 2.0 - 1e-3);
}

TEST_CASE("construct_rays swap symmetry") {
    braytest::Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 0.8);
        const Direction zeta(rng.unit_vector());
        Vec3 ev = rng.unit_vector();
        if (std::abs(dot(ev, zeta.vec())) > 0.99) ev = cross(zeta.vec(), Vec3{0, 0, 1});
        const Direction eta(ev);
        const auto rc1 = construct_rays(unit_ball, x, zeta, eta);
        const auto rc2 = construct_rays(unit_ball, x, eta, zeta);
        CHECK(norm(rc1.a - rc2.b) <= 1e-12);
        CHECK(norm(rc1.c - rc2.d) <= 1e-12);
        CHECK(norm(rc1.b - rc2.a) <= 1e-12);
        CHECK(norm(rc1.d - rc2.c) <= 1e-12);
    }
}

TEST_CASE("direction constructor normalizes") {
    const Direction d(3, 4, 0);
    CHECK(std::abs(norm(d.vec()) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(Direction(0, 0, 0), Error);
}
