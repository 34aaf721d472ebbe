#pragma once

#include <functional>

#include "bray/fields.hpp"
#include "bray/geometry.hpp"
#include "bray/quadrature.hpp"

namespace bray {

// Inflow boundary data f(position, direction).
using BoundaryFunction = std::function<double(const Vec3&, const Vec3&)>;
// Interior radiance or source field (x, theta) -> value.
using PhaseSpaceFunction = std::function<double(const Vec3&, const Vec3&)>;

// Beer-Lambert factor exp(-integral of sigma along [x, y]). Equals 1 when
// x == y. Both endpoints must lie in the closed domain (the segment then does
// too, by convexity).
double attenuation(const Domain& dom, const ScalarField& sigma, const Vec3& x, const Vec3& y,
                   const LineRule& rule);

// |d/dt alpha(x, x+t theta) + sigma(x+t theta) alpha(x, x+t theta)| by central
// differences; test instrumentation for the attenuation ODE.
double attenuation_derivative_residual(const Domain& dom, const ScalarField& sigma, const Vec3& x,
                                       const Direction& theta, double t, double step,
                                       const LineRule& rule);

// Ballistic propagation: (Jf)(x, theta) = alpha(x, entry) f(entry, theta).
double apply_J(const Domain& dom, const ScalarField& sigma, const BoundaryFunction& f,
               const Vec3& x, const Direction& theta, const LineRule& rule);

// Scattering: (Ku)(x, theta) = integral over the sphere of k(x,theta,.) u(x,.).
double apply_K(const ScatteringKernel& kernel, const PhaseSpaceFunction& u, const Vec3& x,
               const Direction& theta, const SphereRule& sphere);

class RadianceGrid;
// Same operator on a sampled field, quadrature over the grid's own direction
// set (exact in direction, trilinear in space).
double apply_K(const ScatteringKernel& kernel, const RadianceGrid& u, const Vec3& x,
               const Direction& theta);

// Attenuated backward line integral:
// (T^-1 S)(x, theta) = integral_0^{|x - entry|} alpha(x, x - t theta) S(x - t theta, theta) dt.
double apply_Tinv(const Domain& dom, const ScalarField& sigma, const PhaseSpaceFunction& S,
                  const Vec3& x, const Direction& theta, const LineRule& rule);

// Rigorous upper bound on ||T^-1 K|| under subcriticality:
// 1 - exp(-sup(sigma) * diameter). Strictly below 1.
double contraction_constant(const CoefficientSet& coeffs);

}  // namespace bray
