#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bray/fields.hpp"
#include "helpers.hpp"

using namespace bray;

namespace {
const Domain unit_ball{{0, 0, 0}, 1.0};

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
    // Rodrigues rotation
    const Vec3 k = normalized(axis);
    return v * std::cos(angle) + cross(k, v) * std::sin(angle) +
           k * dot(k, v) * (1.0 - std::cos(angle));
}
}  // namespace

TEST_CASE("sigma evaluation") {
    const ScalarField c = ScalarField::constant(0.5);
    CHECK(c({0.2, 0.1, -0.3}) == 0.5);

    const ScalarField blob = ScalarField::blobs({{{0, 0, 0}, 0.3, 2.0}});
    CHECK(blob({0, 0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
    // amp * exp(-r^2 / (2 w^2)) with r = w gives amp * exp(-1/2)
    CHECK(blob({0.3, 0, 0}) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));

    const ScalarField peak = ScalarField::blobs({{{0.1, 0, 0}, 0.2, 1.0}});
    CHECK(peak({0.1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("domain containment enforced through coefficient sets") {
    const CoefficientSet coeffs(unit_ball, ScalarField::constant(1.0),
                                {ScalarField::constant(0.2), AngularPhase::isotropic()});
    CHECK(coeffs.sigma({0.5, 0, 0}) == 1.0);
    CHECK_THROWS_AS(coeffs.sigma({1.5, 0, 0}), Error);
    CHECK_THROWS_AS(coeffs.k({0, 1.5, 0}, {1, 0, 0}, {0, 1, 0}), Error);
}

TEST_CASE("kernel evaluation closed forms") {
    const double inv4pi = 1.0 / (4.0 * std::numbers::pi);
    const ScatteringKernel iso{ScalarField::constant(1.0), AngularPhase::isotropic()};
    CHECK(iso({0, 0, 0}, {1, 0, 0}, {0, 1, 0}) == doctest::Approx(inv4pi).epsilon(1e-15));

    // g = 0 reduces to isotropic
    const ScatteringKernel hg0{ScalarField::constant(1.0), AngularPhase::henyey_greenstein(0.0)};
    CHECK(hg0({0, 0, 0}, {1, 0, 0}, {0, 0, 1}) == doctest::Approx(inv4pi).epsilon(1e-14));

    // g = 0.5 forward peak: (1/4pi) * 0.75 / 0.125 = 6/(4pi)
    const AngularPhase hg = AngularPhase::henyey_greenstein(0.5);
    CHECK(hg(1.0) == doctest::Approx(6.0 * inv4pi).epsilon(1e-13));
    // right angle: (1/4pi) * 0.75 / 1.25^{3/2}
    CHECK(hg(0.0) == doctest::Approx(inv4pi * 0.75 / std::pow(1.25, 1.5)).epsilon(1e-13));
}

TEST_CASE("kernel symmetry is exact by construction") {
    const ScatteringKernel k{ScalarField::blobs({{{0.1, -0.2, 0}, 0.4, 0.3}}, 0.05),
                             AngularPhase::henyey_greenstein(0.4)};
    braytest::Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 1.0);
        const Vec3 t1 = rng.unit_vector(), t2 = rng.unit_vector();
        CHECK(k(x, t1, t2) == k(x, t2, t1));  // bitwise: same dot product both ways
    }
}

TEST_CASE("kernel rotation invariance") {
    const ScatteringKernel k{ScalarField::constant(1.0), AngularPhase::henyey_greenstein(-0.3)};
    braytest::Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 x = rng.in_ball({0, 0, 0}, 1.0);
        const Vec3 t1 = rng.unit_vector(), t2 = rng.unit_vector();
        const Vec3 axis = rng.unit_vector();
        const double ang = rng.uniform(0, 2 * std::numbers::pi);
        const Vec3 r1 = rotate(t1, axis, ang), r2 = rotate(t2, axis, ang);
        CHECK(k(x, r1, r2) == doctest::Approx(k(x, t1, t2)).epsilon(1e-12));
    }
}

TEST_CASE("angular profiles integrate to one over the sphere") {
    for (double g : {0.0, 0.3, -0.3, 0.7, -0.7}) {
        const AngularPhase p =
            g == 0.0 ? AngularPhase::isotropic() : AngularPhase::henyey_greenstein(g);
        CHECK(p.sphere_integral() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("subcriticality check") {
    const auto samples = default_subcriticality_samples(unit_ball);

    // isotropic with s = 0.5 against sigma = 1: ratio 0.5
    const ScatteringKernel half{ScalarField::constant(0.5), AngularPhase::isotropic()};
    auto rep = check_subcriticality(unit_ball, ScalarField::constant(1.0), half, samples);
    CHECK(rep.passed);
    CHECK(rep.max_ratio == doctest::Approx(0.5).epsilon(1e-9));

    // no scattering at all
    const ScatteringKernel none{ScalarField::constant(0.0), AngularPhase::isotropic()};
    rep = check_subcriticality(unit_ball, ScalarField::constant(1.0), none, samples);
    CHECK(rep.passed);
    CHECK(rep.max_ratio == 0.0);

    // s = 1 against sigma = 0.1: ratio 10, fail
    const ScatteringKernel strong{ScalarField::constant(1.0), AngularPhase::isotropic()};
    rep = check_subcriticality(unit_ball, ScalarField::constant(0.1), strong, samples);
    CHECK(!rep.passed);
    CHECK(rep.max_ratio == doctest::Approx(10.0).epsilon(1e-9));

    // sigma = 0 where k > 0 is an outright violation
    CHECK_THROWS_AS(check_subcriticality(unit_ball, ScalarField::constant(0.0), strong, samples),
                    Error);
    // and coefficient-set construction fails fast on it
    CHECK_THROWS_AS(CoefficientSet(unit_ball, ScalarField::constant(0.1), strong), Error);
}

TEST_CASE("tabulated grid interpolation") {
    TabulatedGrid g;
    g.lo = {-1, -1, -1};
    g.hi = {1, 1, 1};
    g.nx = g.ny = g.nz = 3;
    g.values.assign(27, 1.0);
    const ScalarField f = ScalarField::tabulated(g);
    CHECK(f({0.3, -0.2, 0.7}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.upper_bound() == 1.0);
}
