#pragma once

#include <array>
#include <optional>

#include "bray/beam.hpp"
#include "bray/fields.hpp"
#include "bray/transport.hpp"

namespace bray {

// Two-frequency model: excitation light u attenuates with sigma_e and feeds,
// through one collision, the fluorescence field v which attenuates with
// sigma_f. v does not scatter again at its own frequency, so the forward
// model is an exact two-term composition rather than a series.
class MultiFreqCoefficients {
public:
    MultiFreqCoefficients(Domain domain, ScalarField sigma_e, ScalarField sigma_f,
                          ScatteringKernel kernel);

    const Domain& domain() const { return domain_; }
    const ScalarField& sigma_e() const { return sigma_e_; }
    const ScalarField& sigma_f() const { return sigma_f_; }
    const ScatteringKernel& kernel() const { return kernel_; }

private:
    Domain domain_;
    ScalarField sigma_e_, sigma_f_;
    ScatteringKernel kernel_;
};

// Inflow data for the coupled system: phi feeds u, psi feeds v. Narrow-beam
// conditions carry their BeamSpec so the solver can integrate them with the
// localized quadrature a generic sphere rule cannot resolve.
struct MFBoundaryCondition {
    BoundaryFunction phi;
    BoundaryFunction psi;
    int index = 0;  // 1..8 when taken from the eight-condition table
    std::optional<BeamSpec> phi_beam;
    std::optional<BeamSpec> psi_beam;
};

// The eight-condition table over a ray construction: delta-normalized
// excitation beams into a, b, c, d for the four single-scatter numerators
// (j = 1..4), unit excitation beams for the two u denominators (j = 5, 6),
// unit fluorescence-frequency beams for the two v denominators (j = 7, 8).
MFBoundaryCondition mf_condition(const Domain& dom, int index, const RayConstruction& rays,
                                 double eps, double gain = 1.0);

// Detector where the tuple entry for condition j is read.
BoundaryPoint mf_detector(const Domain& dom, int index, const RayConstruction& rays);

// Boundary readings of the exact solution u = J_e phi,
// v = T_f^-1 K J_e phi + J_f psi, evaluated pointwise. Beam conditions go
// through the localized double integral (renormalized for delta-normalized
// beams); generic smooth data through sphere-rule quadrature.
struct MFReading {
    double u = 0.0;
    double v = 0.0;
};
MFReading solve_multifreq(const MultiFreqCoefficients& coeffs, const MFBoundaryCondition& bc,
                          const BoundaryPoint& exit, const QuadratureSpec& quad,
                          const BeamQuadrature& bq = {});

// Order: v1 v2 v3 v4 (single-scatter numerators), u5 u6 v7 v8 (ballistic
// denominators), matching the eight boundary conditions of the two-frequency
// reconstruction formula.
using MfTuple = std::array<double, 8>;

// The eight epsilon -> 0 limits by direct attenuation/kernel evaluation.
MfTuple analytic_mf_measurements(const MultiFreqCoefficients& coeffs, const RayConstruction& rays,
                                 const LineRule& rule);

// Finite-epsilon simulation: delta-normalized excitation beams for the four v
// numerators (mixed sigma_e / sigma_f legs), unit beams for the four ballistic
// denominators, which the scatter-free structure makes exact at any epsilon.
MfTuple simulate_mf_tuple(const MultiFreqCoefficients& coeffs, const RayConstruction& rays,
                          double eps, double gain, const BeamQuadrature& bq);

}  // namespace bray
