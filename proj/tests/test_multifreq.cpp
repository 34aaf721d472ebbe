#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bray/multifreq.hpp"
#include "bray/recon.hpp"
#include "bray/transport.hpp"

using namespace bray;

namespace {
const Domain unit_ball{{0, 0, 0}, 1.0};

MultiFreqCoefficients mf_phantom(double se = 0.3, double sf = 0.1, double s = 0.05) {
    return MultiFreqCoefficients(unit_ball, ScalarField::constant(se), ScalarField::constant(sf),
                                 {ScalarField::constant(s), AngularPhase::isotropic()});
}

RayConstruction central_rays() {
    return construct_rays(unit_ball, {0, 0, 0}, Direction(1, 0, 0), Direction(0, 1, 0));
}
}  // namespace

TEST_CASE("fluorescence vanishes without scattering or fluorescent source") {
    const MultiFreqCoefficients coeffs(unit_ball, ScalarField::constant(0.3),
                                       ScalarField::constant(0.1),
                                       {ScalarField::constant(0.0), AngularPhase::isotropic()});
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 64);
    MFBoundaryCondition bc;
    bc.phi = [](const Vec3&, const Vec3&) { return 1.0; };
    bc.psi = [](const Vec3&, const Vec3&) { return 0.0; };
    const auto exit = BoundaryPoint::classify(unit_ball, {1, 0, 0}, Direction(1, 0, 0));
    const auto r = solve_multifreq(coeffs, bc, exit, quad);
    CHECK(r.v == 0.0);
    CHECK(r.u == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
}

TEST_CASE("no excitation source leaves only the ballistic fluorescence") {
    const MultiFreqCoefficients coeffs = mf_phantom();
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 64);
    MFBoundaryCondition bc;
    bc.phi = [](const Vec3&, const Vec3&) { return 0.0; };
    bc.psi = [](const Vec3& p, const Vec3&) { return 1.0 + 0.5 * p.y; };
    const auto exit = BoundaryPoint::classify(unit_ball, {1, 0, 0}, Direction(1, 0, 0));
    const auto r = solve_multifreq(coeffs, bc, exit, quad);
    CHECK(r.u == 0.0);
    // J_f psi: attenuate from (-1,0,0) where psi = 1
    CHECK(r.v == doctest::Approx(std::exp(-0.1 * 2.0)).epsilon(1e-10));
}

TEST_CASE("degenerate frequencies reduce to the single-frequency second term") {
    // smooth boundary data, general quadrature path against the
    // single-frequency operator composition
    const MultiFreqCoefficients coeffs = mf_phantom(0.4, 0.4, 0.1);
    const CoefficientSet single(unit_ball, ScalarField::constant(0.4),
                                {ScalarField::constant(0.1), AngularPhase::isotropic()});
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 128);
    const auto phi = [](const Vec3& p, const Vec3&) { return 1.0 + 0.3 * p.z; };
    MFBoundaryCondition bc;
    bc.phi = phi;
    bc.psi = [](const Vec3&, const Vec3&) { return 0.0; };
    const auto exit = BoundaryPoint::classify(unit_ball, {1, 0, 0}, Direction(1, 0, 0));
    const auto r = solve_multifreq(coeffs, bc, exit, quad);

    const auto u1 = [&](const Vec3& y, const Vec3& d) {
        return apply_J(unit_ball, single.sigma_field(), phi, y, Direction(d), quad.line);
    };
    const auto source = [&](const Vec3& y, const Vec3& d) {
        return apply_K(single.kernel(), u1, y, Direction(d), quad.sphere);
    };
    const double u2 = apply_Tinv(unit_ball, single.sigma_field(), source, {1.0 - 1e-9, 0, 0},
                                 Direction(1, 0, 0), quad.line);
    CHECK(r.v == doctest::Approx(u2).epsilon(1e-10));
}

TEST_CASE("analytic eight-tuple closed forms") {
    const MultiFreqCoefficients coeffs = mf_phantom();
    const auto rays = central_rays();
    const LineRule rule{0.01, 4};
    const auto m = analytic_mf_measurements(coeffs, rays, rule);

    const double k = coeffs.kernel()({0, 0, 0}, rays.zeta.vec(), rays.eta.vec());
    CHECK(m[0] == doctest::Approx(std::exp(-0.3) * k * std::exp(-0.1)).epsilon(1e-12));
    CHECK(m[4] == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(m[5] == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(m[6] == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
    CHECK(m[7] == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));

    // no scattering: the four numerators vanish
    const MultiFreqCoefficients none(unit_ball, ScalarField::constant(0.3),
                                     ScalarField::constant(0.1),
                                     {ScalarField::constant(0.0), AngularPhase::isotropic()});
    const auto m0 = analytic_mf_measurements(none, rays, rule);
    for (int j = 0; j < 4; ++j) CHECK(m0[j] == 0.0);
}

TEST_CASE("frequency-degenerate tuple matches the single-frequency limits") {
    const MultiFreqCoefficients coeffs = mf_phantom(0.3, 0.3, 0.05);
    const CoefficientSet single(unit_ball, ScalarField::constant(0.3),
                                {ScalarField::constant(0.05), AngularPhase::isotropic()});
    const auto rays = central_rays();
    const LineRule rule{0.01, 4};
    const auto m = analytic_mf_measurements(coeffs, rays, rule);
    const auto quad = analytic_single_scatter(single, rays, rule);
    CHECK(m[0] == doctest::Approx(quad.U_ad).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(quad.U_bc).epsilon(1e-12));
    CHECK(m[4] == doctest::Approx(quad.u_ac).epsilon(1e-12));
    CHECK(m[7] == doctest::Approx(quad.u_bd).epsilon(1e-12));
}

TEST_CASE("angle-only kernel makes the four numerator kernels equal") {
    const ScatteringKernel k{ScalarField::constant(0.2), AngularPhase::henyey_greenstein(0.5)};
    const Vec3 x{0.1, -0.2, 0.05};
    const Vec3 zeta = normalized({1, 0.2, 0}), eta = normalized({-0.1, 1, 0.3});
    const double k1 = k(x, zeta, eta);
    CHECK(k(x, eta, zeta) == k1);
    CHECK(k(x, -zeta, -eta) == doctest::Approx(k1).epsilon(1e-15));
    CHECK(k(x, -eta, -zeta) == doctest::Approx(k1).epsilon(1e-15));
}

TEST_CASE("reversal cancellation structure of the eight-tuple") {
    // product of the four numerators equals the product of all eight
    // one-leg attenuations times k^4
    const MultiFreqCoefficients coeffs = mf_phantom(0.25, 0.15, 0.05);
    const Domain& dom = coeffs.domain();
    const auto rays = construct_rays(dom, {0.15, -0.1, 0.2}, Direction(1, 0, 0),
                                     Direction(0, 0.6, 0.8));
    const LineRule rule{0.01, 4};
    const auto m = analytic_mf_measurements(coeffs, rays, rule);
    auto ae = [&](const Vec3& p) { return attenuation(dom, coeffs.sigma_e(), p, rays.x, rule); };
    auto af = [&](const Vec3& p) { return attenuation(dom, coeffs.sigma_f(), rays.x, p, rule); };
    const double k = coeffs.kernel()(rays.x, rays.zeta.vec(), rays.eta.vec());
    const double lhs = m[0] * m[1] * m[2] * m[3];
    const double rhs = ae(rays.a) * ae(rays.b) * ae(rays.c) * ae(rays.d) * af(rays.a) *
                       af(rays.b) * af(rays.c) * af(rays.d) * k * k * k * k;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
}

TEST_CASE("degenerate frequencies match the single-frequency beam measurement") {
    const MultiFreqCoefficients mf = mf_phantom(0.3, 0.3, 0.05);
    const CoefficientSet single(unit_ball, ScalarField::constant(0.3),
                                {ScalarField::constant(0.05), AngularPhase::isotropic()});
    const auto rays = central_rays();
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 64);
    const BeamQuadrature bq = BeamQuadrature::fine(quad);
    const double eps = 0.1;

    const auto tuple = simulate_mf_tuple(mf, rays, eps, 1.0, bq);
    BeamSpec beam{BoundaryPoint::classify(unit_ball, rays.a, rays.zeta), eps,
                  BeamClass::DeltaNormalized, 1.0};
    const auto det = BoundaryPoint::classify(unit_ball, rays.d, rays.eta);
    const auto br = measure_collision_terms(single, beam, det, bq);
    CHECK(tuple[0] == doctest::Approx(br.single_scatter).epsilon(1e-10));
}

TEST_CASE("indexed boundary conditions reproduce the tuple entries") {
    const MultiFreqCoefficients coeffs = mf_phantom();
    const auto rays = central_rays();
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 64);
    const BeamQuadrature bq = BeamQuadrature::fine(quad);
    const double eps = 0.1;

    const auto tuple = simulate_mf_tuple(coeffs, rays, eps, 1.0, bq);
    for (int j = 1; j <= 8; ++j) {
        const auto bc = mf_condition(unit_ball, j, rays, eps);
        CHECK(bc.index == j);
        const auto r = solve_multifreq(coeffs, bc, mf_detector(unit_ball, j, rays), quad, bq);
        const double reading = (j == 5 || j == 6) ? r.u : r.v;
        CHECK(reading == doctest::Approx(tuple[j - 1]).epsilon(1e-12));
    }
    // denominator conditions are exact at finite epsilon
    CHECK(tuple[4] == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(tuple[6] == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));

    CHECK_THROWS_AS(mf_condition(unit_ball, 0, rays, eps), Error);
    CHECK_THROWS_AS(mf_condition(unit_ball, 9, rays, eps), Error);
}

TEST_CASE("finite-epsilon tuple approaches the analytic one") {
    const MultiFreqCoefficients coeffs = mf_phantom();
    const auto rays = central_rays();
    const QuadratureSpec quad = QuadratureSpec::defaults(1.0, 64);
    const auto limits = analytic_mf_measurements(coeffs, rays, quad.line);
    const auto sim = simulate_mf_tuple(coeffs, rays, 0.1, 1.0, BeamQuadrature::fine(quad));
    for (int j = 0; j < 4; ++j)
        CHECK(sim[j] == doctest::Approx(limits[j]).epsilon(0.02));
    for (int j = 4; j < 8; ++j)
        CHECK(sim[j] == doctest::Approx(limits[j]).epsilon(1e-10));
}
