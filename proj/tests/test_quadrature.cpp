#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bray/quadrature.hpp"

using namespace bray;

TEST_CASE("Gauss-Legendre reproduces known 4-point rule") {
    const GaussRule& g = gauss_legendre(4);
    CHECK(g.nodes[3] == doctest::Approx(0.8611363115940526).epsilon(1e-14));
    CHECK(g.nodes[2] == doctest::Approx(0.3399810435848563).epsilon(1e-14));
    CHECK(g.weights[3] == doctest::Approx(0.3478548451374538).epsilon(1e-14));
    CHECK(g.weights[2] == doctest::Approx(0.6521451548625461).epsilon(1e-14));
}

TEST_CASE("line rule integrates degree-7 polynomials exactly per panel") {
    const LineRule rule{0.25, 4};
    // integral of t^7 over [0, 1] = 1/8
    const double v = integrate_ray([](double t) { return std::pow(t, 7); }, 1.0, rule);
    CHECK(v == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
    const double w = integrate_ray([](double t) { return std::exp(-t); }, 2.0, rule);
    CHECK(w == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("spherical Fibonacci weights sum to the sphere area") {
    for (int n : {64, 256, 1000}) {
        const SphereRule rule = fibonacci_sphere(n);
        CHECK(std::abs(rule.weight * n - 4.0 * std::numbers::pi) <= 1e-12);
        for (const Vec3& d : rule.dirs) CHECK(std::abs(norm(d) - 1.0) <= 1e-12);
    }
}

TEST_CASE("Fibonacci rule integrates smooth functions") {
    const SphereRule rule = fibonacci_sphere(256);
    double sum_z = 0.0, sum_z2 = 0.0;
    for (const Vec3& d : rule.dirs) {
        sum_z += d.z;
        sum_z2 += d.z * d.z;
    }
    // odd function cancels exactly by the lattice symmetry in z
    CHECK(std::abs(sum_z * rule.weight) <= 1e-10);
    // integral of z^2 over the sphere is 4*pi/3
    CHECK(sum_z2 * rule.weight == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-4));
}

TEST_CASE("cap integration covers the full sphere at half-angle pi") {
    const double full = integrate_cap([](const Vec3&) { return 1.0; }, {0, 0, 1},
                                      std::numbers::pi, 64, 8);
    CHECK(full == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-10));
    // area of a polar cap: 2*pi*(1-cos(delta))
    const double delta = 0.3;
    const double cap = integrate_cap([](const Vec3&) { return 1.0; }, {1, 0, 0}, delta, 24, 8);
    CHECK(cap == doctest::Approx(2.0 * std::numbers::pi * (1.0 - std::cos(delta))).epsilon(1e-10));
}

TEST_CASE("surface cap integral matches sphere area patch") {
    const Vec3 center{0, 0, 0};
    const double R = 2.0;
    const double delta = 0.4;
    const double patch = integrate_sphere_surface_cap([](const Vec3&) { return 1.0; }, center, R,
                                                      {0, 0, 2.0}, delta, 24, 8);
    CHECK(patch ==
          doctest::Approx(2.0 * std::numbers::pi * R * R * (1.0 - std::cos(delta))).epsilon(1e-10));
}

TEST_CASE("nearest direction lookup") {
    const SphereRule rule = fibonacci_sphere(128);
    for (int i = 0; i < rule.size(); i += 17)
        CHECK(nearest_direction(rule, rule.dirs[i]) == i);
}
