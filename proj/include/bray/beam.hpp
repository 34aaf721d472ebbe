#pragma once

#include <functional>

#include "bray/fields.hpp"
#include "bray/geometry.hpp"
#include "bray/quadrature.hpp"

namespace bray {

// Smooth compactly supported bump with psi(0) = 1: exp(1 - 1/(1 - r^2)) on
// r < 1, zero outside. Shapes both the spot and the direction profile of a
// narrow boundary source.
double bump(double r);

// Chordal distance |u - v| between unit vectors -> angle between them.
double chord_to_angle(double chord);

// k(x, outgoing, incoming); adapter so the same integrals serve the one- and
// two-frequency models and the unit-kernel normalization probe.
using KernelFn = std::function<double(const Vec3&, const Vec3&, const Vec3&)>;

enum class BeamClass {
    Unit,             // amplitude 1: ballistic readings stay finite
    DeltaNormalized,  // amplitude eps^-3: single-scatter readings stay finite
};

// Narrow inflow source: spot of width eps around `base` on the boundary,
// direction profile of width eps around its direction.
struct BeamSpec {
    BoundaryPoint base;
    double epsilon = 0.1;
    BeamClass cls = BeamClass::Unit;
    double gain = 1.0;  // source brightness, multiplies every reading

    double amplitude() const;
    // Source value at an inflow boundary point/direction.
    double boundary_value(const Vec3& position, const Vec3& direction) const;
};

// Quadrature controls for the localized double integral.
struct BeamQuadrature {
    int window_panels_min = 12;
    int window_panels_max = 96;
    double window_panel_frac = 0.35;  // target panel length as a fraction of eps
    int cap_polar = 16;
    int cap_azimuth = 32;
    double support_margin = 3.5;  // safety factor on localization estimates
    LineRule attenuation_rule{0.01, 4};

    static BeamQuadrature fine(const QuadratureSpec& q);
    static BeamQuadrature coarse(const QuadratureSpec& q);
};

// Ballistic term J phi at (endpoint, out_dir): attenuation from the entry
// point times the source value there. Exactly alpha(a, c) * amplitude for a
// detector aligned with the beam axis, zero off the beam support.
double ballistic_reading(const Domain& dom, const ScalarField& sigma, const BeamSpec& beam,
                         const Vec3& endpoint, const Vec3& out_dir, const LineRule& rule);

// Second collision-expansion term T^-1 K J phi at (endpoint, out_dir), by the
// explicit double integral: backward chord of the detector, times the cap of
// incoming directions the beam support localizes to. sigma_in attenuates the
// leg from the source to the collision point, sigma_out the leg to the
// detector. Valid for boundary or interior endpoints.
double single_scatter_reading(const Domain& dom, const ScalarField& sigma_in,
                              const ScalarField& sigma_out, const KernelFn& kernel,
                              const Vec3& spot, const Vec3& beam_dir, double eps, double amplitude,
                              const Vec3& endpoint, const Vec3& out_dir,
                              const BeamQuadrature& bq);

// Geometric normalization of the delta-normalized channel: the same double
// integral with unit kernel, no attenuation and unit delta-amplitude. Dividing
// a U-channel reading by this constant renormalizes the bump profile for the
// configuration so the reading converges to alpha k alpha.
double delta_normalization(const Domain& dom, const Vec3& spot, const Vec3& beam_dir, double eps,
                           const Vec3& endpoint, const Vec3& out_dir, const BeamQuadrature& bq);

struct CollisionBreakdown {
    double ballistic = 0.0;       // J phi term at the detector
    double single_scatter = 0.0;  // T^-1 K J phi term (renormalized for U beams)
    double tail_bound = 0.0;      // C^2/(1-C) * sup |J phi|, all later terms
    double contraction = 0.0;     // C used in the bound
};

// Detector reading split by collision count, tail bound from the contraction
// estimate. The exit point must lie on the outflow boundary.
CollisionBreakdown measure_collision_terms(const CoefficientSet& coeffs, const BeamSpec& beam,
                                           const BoundaryPoint& exit, const BeamQuadrature& bq);

// Proof-route size estimate of the multi-collision remainder for a
// delta-normalized beam: contraction tail factor times the boundary mass of
// the source, which scales like eps in dimension three. Only its scaling is
// meaningful; the convergence experiment fits its log-log slope.
double multi_collision_tail_estimate(const CoefficientSet& coeffs, const BeamSpec& beam,
                                     int cap_polar = 24, int cap_azimuth = 48);

}  // namespace bray
