#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bray/beam.hpp"
#include "bray/fields.hpp"
#include "bray/multifreq.hpp"

namespace bray {

enum class Provenance { AnalyticLimit, FiniteEpsilon, Noisy };

// The four boundary readings the pointwise formula consumes: two
// delta-normalized single-scatter readings across the chords, two ballistic
// readings along them.
struct MeasurementQuad {
    double U_ad = 0.0;  // beam (a, zeta) read at (d, eta)
    double U_bc = 0.0;  // beam (b, eta) read at (c, zeta)
    double u_ac = 0.0;  // beam (a, zeta) read at (c, zeta)
    double u_bd = 0.0;  // beam (b, eta) read at (d, eta)
    Provenance provenance = Provenance::AnalyticLimit;
    double epsilon = 0.0;  // 0 for analytic limits
};

// Desk-scale oracle: the epsilon -> 0 limits evaluated directly from
// attenuation quadratures and one kernel evaluation at the crossing point.
MeasurementQuad analytic_single_scatter(const CoefficientSet& coeffs, const RayConstruction& rays,
                                        const LineRule& rule);

// Finite-epsilon forward simulation of the same four readings; ballistic
// readings include the single-scatter contamination an aligned detector sees.
MeasurementQuad simulate_quad(const CoefficientSet& coeffs, const RayConstruction& rays,
                              double eps, double gain, const BeamQuadrature& bq);

// (U_ad * U_bc) / (u_ac * u_bd): plain algebra, no smoothing. Denominators at
// or below the floor raise Underflow; negative inputs raise InvalidMeasurement.
double reconstruct_k2(const MeasurementQuad& m, double denom_floor = 1e-12);

// (v1 v2 v3 v4) / (u5 u6 v7 v8) for the two-frequency tuple.
double reconstruct_k4(const MfTuple& m, double denom_floor = 1e-12);

// Worst-case |change in k2 estimate| over sup-norm-delta perturbations of the
// four readings, from the quotient-rule decomposition. Requires
// delta < min(u_ac, u_bd); the noise response stays below this line.
double k2_noise_bound(const MeasurementQuad& m, double delta);

enum class PointStatus { Ok, DegenerateGeometry, Underflow };

struct ReconPoint {
    Vec3 x;
    PointStatus status = PointStatus::Ok;
    double estimate = 0.0;   // k^2 (or k^4 for the two-frequency scan)
    double truth = 0.0;      // ground-truth value when the phantom is known
    double rel_error = 0.0;  // |estimate-truth| / max(|truth|, tiny), when truth known
};

struct ReconstructionGrid {
    Direction zeta;
    Direction eta;
    std::vector<ReconPoint> points;
    bool has_truth = false;

    int count(PointStatus s) const;
    double max_rel_error() const;  // over ok points; 0 if none
    double max_abs_error() const;
};

using QuadSource = std::function<MeasurementQuad(const RayConstruction&)>;
using TruthFn = std::function<double(const Vec3&)>;

struct ReconOptions {
    double denom_floor = 1e-12;
    double min_chord_fraction = 0.05;  // chords shorter than this * radius are degenerate
};

// Pointwise sweep: construct the rays, pull a quad from the source, apply the
// formula. Failures become per-point statuses, never aborts.
ReconstructionGrid reconstruct_field(const Domain& dom, const std::vector<Vec3>& points,
                                     const Direction& zeta, const Direction& eta,
                                     const QuadSource& source, const TruthFn& truth,
                                     const ReconOptions& opts = {});

// sqrt(k^2)/kappa(zeta . eta) pointwise; valid because k >= 0.
std::vector<double> recover_s_factorized(const ReconstructionGrid& grid,
                                         const AngularPhase& kappa);

// Straight-chord attenuation data for the baseline: -log(reading/amplitude).
struct Chord {
    Vec3 entry, exit;
};
std::vector<double> xray_line_integrals(const std::vector<double>& ballistic_readings,
                                        double amplitude);

// Voxel grid estimate of sigma.
struct SigmaGrid {
    int n = 0;
    Vec3 lo;
    double cell = 0.0;
    std::vector<double> values;  // x-major voxels
    bool underdetermined = false;

    double mean_over_ball(const Domain& dom, double radius_fraction) const;
};

struct ArtOptions {
    int iterations = 50;
    double relaxation = 0.5;
    int min_chords = 64;
};

// Kaczmarz sweeps over the ray equations with nonnegativity projection after
// each sweep; deterministic chord order.
SigmaGrid art_invert_sigma(const std::vector<double>& line_integrals,
                           const std::vector<Chord>& chords, const Domain& dom, int grid_n,
                           const ArtOptions& opts = {});

// Uniform lattice of n^3 points over the cube of the given half width.
std::vector<Vec3> scan_lattice(const Vec3& center, double half_extent, int n);

}  // namespace bray
