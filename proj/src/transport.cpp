#include "bray/transport.hpp"

#include <cmath>

#include "bray/errors.hpp"
#include "bray/radiance.hpp"

namespace bray {

double attenuation(const Domain& dom, const ScalarField& sigma, const Vec3& x, const Vec3& y,
                   const LineRule& rule) {
    if (!dom.contains(x) || !dom.contains(y))
        fail(ErrorCode::DomainViolation, "attenuation segment leaves the closed domain");
    const double len = norm(y - x);
    if (len == 0.0) return 1.0;
    if (sigma.is_constant()) return std::exp(-sigma.constant_value() * len);
    const Vec3 u = (y - x) / len;
    const double depth =
        integrate_ray([&](double t) { return sigma(x + u * t); }, len, rule);
    return std::exp(-depth);
}

double attenuation_derivative_residual(const Domain& dom, const ScalarField& sigma, const Vec3& x,
                                       const Direction& theta, double t, double step,
                                       const LineRule& rule) {
    const Vec3 p = x + theta.vec() * t;
    if (!dom.is_interior(p))
        fail(ErrorCode::DomainViolation, "derivative check point must be interior");
    const double ap = attenuation(dom, sigma, x, x + theta.vec() * (t + step), rule);
    const double am = attenuation(dom, sigma, x, x + theta.vec() * (t - step), rule);
    const double a0 = attenuation(dom, sigma, x, p, rule);
    return std::abs((ap - am) / (2.0 * step) + sigma(p) * a0);
}

double apply_J(const Domain& dom, const ScalarField& sigma, const BoundaryFunction& f,
               const Vec3& x, const Direction& theta, const LineRule& rule) {
    const Vec3 entry = boundary_entry(dom, x, theta);
    return attenuation(dom, sigma, x, entry, rule) * f(entry, theta.vec());
}

double apply_K(const ScatteringKernel& kernel, const PhaseSpaceFunction& u, const Vec3& x,
               const Direction& theta, const SphereRule& sphere) {
    const double s = kernel.spatial(x);
    if (s == 0.0) return 0.0;
    double acc = 0.0;
    for (const Vec3& d : sphere.dirs) acc += kernel.angular(dot(theta.vec(), d)) * u(x, d);
    return s * acc * sphere.weight;
}

double apply_K(const ScatteringKernel& kernel, const RadianceGrid& u, const Vec3& x,
               const Direction& theta) {
    const SphereRule& sphere = u.sphere();
    const double s = kernel.spatial(x);
    if (s == 0.0) return 0.0;
    double acc = 0.0;
    for (int l = 0; l < sphere.size(); ++l)
        acc += kernel.angular(dot(theta.vec(), sphere.dirs[l])) * u.interp(x, l);
    return s * acc * sphere.weight;
}

double apply_Tinv(const Domain& dom, const ScalarField& sigma, const PhaseSpaceFunction& S,
                  const Vec3& x, const Direction& theta, const LineRule& rule) {
    if (!dom.contains(x)) fail(ErrorCode::DomainViolation, "T^-1 point outside the closed domain");
    const double len = exit_distance(dom, x, -theta.vec());
    if (!(len > 0.0)) return 0.0;
    const Vec3 td = theta.vec();
    if (sigma.is_constant()) {
        const double s0 = sigma.constant_value();
        return integrate_ray(
            [&](double t) { return std::exp(-s0 * t) * S(x - td * t, td); }, len, rule);
    }
    // progressive optical depth would need ordered nodes; attenuation per node
    // keeps the quadrature composable and this path is not performance critical
    return integrate_ray(
        [&](double t) {
            return attenuation(dom, sigma, x, x - td * t, rule) * S(x - td * t, td);
        },
        len, rule);
}

double contraction_constant(const CoefficientSet& coeffs) {
    const double c =
        1.0 - std::exp(-coeffs.sigma_upper_bound() * coeffs.domain().diameter());
    return c;
}

}  // namespace bray
