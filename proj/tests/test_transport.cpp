#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bray/transport.hpp"
#include "helpers.hpp"

using namespace bray;

namespace {
const Domain unit_ball{{0, 0, 0}, 1.0};
const LineRule fine{0.01, 4};

// Independent brute-force oracle: composite trapezoid with a million nodes.
double trapezoid_attenuation(const ScalarField& sigma, const Vec3& x, const Vec3& y, int n) {
    const double len = norm(y - x);
    if (len == 0.0) return 1.0;
    const Vec3 u = (y - x) / len;
    const double h = len / n;
    double acc = 0.5 * (sigma(x) + sigma(y));
    for (int i = 1; i < n; ++i) acc += sigma(x + u * (i * h));
    return std::exp(-acc * h);
}
}  // namespace

TEST_CASE("attenuation closed forms") {
    const ScalarField zero = ScalarField::constant(0.0);
    CHECK(attenuation(unit_ball, zero, {-0.5, 0, 0}, {0.5, 0, 0}, fine) == 1.0);

    const Domain big{{0, 0, 0}, 2.0};
    const ScalarField half = ScalarField::constant(0.5);
    // sigma * length = 0.5 * 2
    CHECK(attenuation(big, half, {-1, 0, 0}, {1, 0, 0}, fine) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(attenuation(unit_ball, half, {0.2, 0, 0}, {0.2, 0, 0}, fine) == 1.0);
}

TEST_CASE("attenuation quadrature matches the trapezoid oracle") {
    const ScalarField blob = ScalarField::blobs({{{0.2, 0.1, 0}, 0.25, 0.8}}, 0.1);
    const Vec3 x{-0.7, 0.1, 0.05}, y{0.6, -0.4, -0.2};
    const double oracle = trapezoid_attenuation(blob, x, y, 1000000);
    CHECK(attenuation(unit_ball, blob, x, y, fine) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("attenuation segments outside the domain are rejected") {
    const ScalarField half = ScalarField::constant(0.5);
    CHECK_THROWS_AS(attenuation(unit_ball, half, {0, 0, 0}, {2, 0, 0}, fine), Error);
}

TEST_CASE("attenuation symmetry and multiplicativity") {
    const ScalarField blob = ScalarField::blobs({{{-0.1, 0.2, 0.1}, 0.3, 1.2}}, 0.2);
    braytest::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 0.98);
        const Vec3 y = rng.in_ball({0, 0, 0}, 0.98);
        const double axy = attenuation(unit_ball, blob, x, y, fine);
        const double ayx = attenuation(unit_ball, blob, y, x, fine);
        CHECK(axy == doctest::Approx(ayx).epsilon(1e-12));
        const double lam = rng.uniform(0.1, 0.9);
        const Vec3 mid = x + (y - x) * lam;
        const double split = attenuation(unit_ball, blob, x, mid, fine) *
                             attenuation(unit_ball, blob, mid, y, fine);
        CHECK(axy == doctest::Approx(split).epsilon(1e-10));
    }
}

TEST_CASE("attenuation satisfies its transport ODE") {
    const ScalarField zero = ScalarField::constant(0.0);
    CHECK(attenuation_derivative_residual(unit_ball, zero, {-0.2, 0, 0}, Direction(1, 0, 0), 0.3,
                                          1e-4, fine) <= 1e-12);

    const ScalarField half = ScalarField::constant(0.5);
    CHECK(attenuation_derivative_residual(unit_ball, half, {-0.2, 0.1, 0}, Direction(1, 0, 0), 0.4,
                                          1e-4, fine) <= 1e-7);

    const ScalarField blob = ScalarField::blobs({{{0.1, 0, 0}, 0.3, 1.0}});
    CHECK(attenuation_derivative_residual(unit_ball, blob, {-0.3, 0, 0.1}, Direction(0.8, 0.6, 0),
                                          0.5, 1e-4, fine) <= 1e-6);
}

TEST_CASE("ballistic propagation J") {
    const auto ones = [](const Vec3&, const Vec3&) { return 1.0; };
    const ScalarField zero = ScalarField::constant(0.0);
    CHECK(apply_J(unit_ball, zero, ones, {0.3, -0.2, 0.1}, Direction(0, 0, 1), fine) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const ScalarField s03 = ScalarField::constant(0.3);
    const Vec3 x{0.25, 0, 0};
    const double L = norm(x - boundary_entry(unit_ball, x, Direction(1, 0, 0)));
    CHECK(apply_J(unit_ball, s03, ones, x, Direction(1, 0, 0), fine) ==
          doctest::Approx(std::exp(-0.3 * L)).epsilon(1e-12));

    // boundary data supported away from the entry point contributes nothing
    const auto far = [](const Vec3& p, const Vec3&) { return p.x > 0 ? 1.0 : 0.0; };
    CHECK(apply_J(unit_ball, s03, far, x, Direction(1, 0, 0), fine) == 0.0);
}

TEST_CASE("scattering operator K") {
    const SphereRule sphere = fibonacci_sphere(256);
    const ScatteringKernel iso{ScalarField::constant(0.7), AngularPhase::isotropic()};
    const auto ones = [](const Vec3&, const Vec3&) { return 1.0; };
    CHECK(apply_K(iso, ones, {0.1, 0, 0}, Direction(1, 0, 0), sphere) ==
          doctest::Approx(0.7).epsilon(1e-12));

    const ScatteringKernel none{ScalarField::constant(0.0), AngularPhase::isotropic()};
    CHECK(apply_K(none, ones, {0.1, 0, 0}, Direction(1, 0, 0), sphere) == 0.0);

    // odd integrand cancels on the symmetric node set
    const auto odd = [](const Vec3&, const Vec3& d) { return d.z; };
    CHECK(std::abs(apply_K(iso, odd, {0, 0, 0}, Direction(1, 0, 0), sphere)) <= 1e-10);
}

TEST_CASE("backward integral T^-1") {
    const auto zero_src = [](const Vec3&, const Vec3&) { return 0.0; };
    const auto one_src = [](const Vec3&, const Vec3&) { return 1.0; };
    const ScalarField zero = ScalarField::constant(0.0);
    const ScalarField s2 = ScalarField::constant(2.0);

    CHECK(apply_Tinv(unit_ball, s2, zero_src, {0.2, 0, 0}, Direction(1, 0, 0), fine) == 0.0);

    const Vec3 x{0.3, 0.2, -0.1};
    const Direction th(0.6, -0.8, 0);
    const double L = norm(x - boundary_entry(unit_ball, x, th));
    CHECK(apply_Tinv(unit_ball, zero, one_src, x, th, fine) == doctest::Approx(L).epsilon(1e-12));
    CHECK(apply_Tinv(unit_ball, s2, one_src, x, th, fine) ==
          doctest::Approx((1.0 - std::exp(-2.0 * L)) / 2.0).epsilon(1e-10));
}

TEST_CASE("T^-1 sup bound by the chord length") {
    const ScalarField blob = ScalarField::blobs({{{0, 0.1, 0}, 0.3, 1.0}}, 0.1);
    braytest::Rng rng(5);
    const auto src = [&](const Vec3& p, const Vec3&) { return std::sin(7 * p.x) * std::cos(3 * p.y); };
    for (int i = 0; i < 200; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 0.97);
        const Direction th(rng.unit_vector());
        const double v = apply_Tinv(unit_ball, blob, src, x, th, LineRule{0.05, 4});
        CHECK(std::abs(v) <= 2.0 + 1e-9);
    }
}

TEST_CASE("contraction constant closed forms") {
    const ScatteringKernel none{ScalarField::constant(0.0), AngularPhase::isotropic()};
    const CoefficientSet c1(unit_ball, ScalarField::constant(1.0), none);
    CHECK(contraction_constant(c1) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));

    const CoefficientSet c2(unit_ball, ScalarField::constant(0.25), none);
    CHECK(contraction_constant(c2) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));

    const CoefficientSet c0(unit_ball, ScalarField::constant(0.0), none);
    CHECK(contraction_constant(c0) == 0.0);
}
