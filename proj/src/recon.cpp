#include "bray/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bray/errors.hpp"
#include "bray/transport.hpp"

namespace bray {

MeasurementQuad analytic_single_scatter(const CoefficientSet& coeffs, const RayConstruction& rays,
                                        const LineRule& rule) {
    const Domain& dom = coeffs.domain();
    const ScalarField& sigma = coeffs.sigma_field();
    auto alpha = [&](const Vec3& u, const Vec3& v) { return attenuation(dom, sigma, u, v, rule); };
    const Vec3 x = rays.x;
    const Vec3 zeta = rays.zeta.vec(), eta = rays.eta.vec();

    MeasurementQuad m;
    m.provenance = Provenance::AnalyticLimit;
    m.U_ad = alpha(rays.a, x) * coeffs.kernel()(x, zeta, eta) * alpha(x, rays.d);
    m.U_bc = alpha(rays.b, x) * coeffs.kernel()(x, eta, zeta) * alpha(x, rays.c);
    m.u_ac = alpha(rays.a, rays.c);
    m.u_bd = alpha(rays.b, rays.d);
    return m;
}

MeasurementQuad simulate_quad(const CoefficientSet& coeffs, const RayConstruction& rays,
                              double eps, double gain, const BeamQuadrature& bq) {
    const Domain& dom = coeffs.domain();

    auto inflow = [&](const Vec3& p, const Vec3& d) {
        return BoundaryPoint::classify(dom, p, Direction(d));
    };
    const Vec3 zeta = rays.zeta.vec(), eta = rays.eta.vec();

    BeamSpec beam_a{inflow(rays.a, zeta), eps, BeamClass::DeltaNormalized, gain};
    BeamSpec beam_b{inflow(rays.b, eta), eps, BeamClass::DeltaNormalized, gain};
    BeamSpec beam_a_unit{inflow(rays.a, zeta), eps, BeamClass::Unit, gain};
    BeamSpec beam_b_unit{inflow(rays.b, eta), eps, BeamClass::Unit, gain};

    const BoundaryPoint det_c = BoundaryPoint::classify(dom, rays.c, Direction(zeta));
    const BoundaryPoint det_d = BoundaryPoint::classify(dom, rays.d, Direction(eta));

    MeasurementQuad m;
    m.provenance = Provenance::FiniteEpsilon;
    m.epsilon = eps;
    m.U_ad = measure_collision_terms(coeffs, beam_a, det_d, bq).single_scatter;
    m.U_bc = measure_collision_terms(coeffs, beam_b, det_c, bq).single_scatter;
    const CollisionBreakdown ac = measure_collision_terms(coeffs, beam_a_unit, det_c, bq);
    const CollisionBreakdown bd = measure_collision_terms(coeffs, beam_b_unit, det_d, bq);
    m.u_ac = ac.ballistic + ac.single_scatter;
    m.u_bd = bd.ballistic + bd.single_scatter;
    return m;
}

namespace {

void check_inputs_nonnegative(double a, double b, double c, double d) {
    if (a < 0.0 || b < 0.0 || c < 0.0 || d < 0.0)
        fail(ErrorCode::InvalidMeasurement, "measurements must be nonnegative");
}

void check_denominator(double v, double floor_) {
    if (v <= floor_)
        fail(ErrorCode::Underflow, "ballistic reading at or below the underflow floor");
}

}  // namespace

double reconstruct_k2(const MeasurementQuad& m, double denom_floor) {
    check_inputs_nonnegative(m.U_ad, m.U_bc, m.u_ac, m.u_bd);
    check_denominator(m.u_ac, denom_floor);
    check_denominator(m.u_bd, denom_floor);
    return (m.U_ad * m.U_bc) / (m.u_ac * m.u_bd);
}

double reconstruct_k4(const MfTuple& m, double denom_floor) {
    for (double v : m)
        if (v < 0.0) fail(ErrorCode::InvalidMeasurement, "measurements must be nonnegative");
    for (int j = 4; j < 8; ++j) check_denominator(m[j], denom_floor);
    return (m[0] * m[1] * m[2] * m[3]) / (m[4] * m[5] * m[6] * m[7]);
}

double k2_noise_bound(const MeasurementQuad& m, double delta) {
    const double u1 = m.u_ac, u2 = m.u_bd;
    if (!(delta < std::min(u1, u2)))
        fail(ErrorCode::InvalidMeasurement, "noise bound requires delta below both denominators");
    const double U1 = m.U_ad, U2 = m.U_bc;
    const double numer = (U2 + delta) * u1 * u2 + U1 * u1 * u2 + (u2 + delta) * U1 * U2 +
                         u1 * U1 * U2;
    return delta * numer / ((u1 - delta) * (u2 - delta) * u1 * u2);
}

int ReconstructionGrid::count(PointStatus s) const {
    int n = 0;
    for (const auto& p : points) n += p.status == s ? 1 : 0;
    return n;
}

double ReconstructionGrid::max_rel_error() const {
    double m = 0.0;
    for (const auto& p : points)
        if (p.status == PointStatus::Ok) m = std::max(m, p.rel_error);
    return m;
}

double ReconstructionGrid::max_abs_error() const {
    double m = 0.0;
    for (const auto& p : points)
        if (p.status == PointStatus::Ok) m = std::max(m, std::abs(p.estimate - p.truth));
    return m;
}

ReconstructionGrid reconstruct_field(const Domain& dom, const std::vector<Vec3>& points,
                                     const Direction& zeta, const Direction& eta,
                                     const QuadSource& source, const TruthFn& truth,
                                     const ReconOptions& opts) {
    ReconstructionGrid grid{zeta, eta, {}, static_cast<bool>(truth)};
    grid.points.reserve(points.size());
    const double min_chord = opts.min_chord_fraction * dom.radius();
    for (const Vec3& x : points) {
        ReconPoint pt;
        pt.x = x;
        if (!dom.is_interior(x)) {
            pt.status = PointStatus::DegenerateGeometry;
            grid.points.push_back(pt);
            continue;
        }
        if (grid.has_truth) pt.truth = truth(x);
        try {
            const RayConstruction rays = construct_rays(dom, x, zeta, eta);
            if (rays.chord_zeta() < min_chord || rays.chord_eta() < min_chord) {
                pt.status = PointStatus::DegenerateGeometry;
            } else {
                const MeasurementQuad quad = source(rays);
                pt.estimate = reconstruct_k2(quad, opts.denom_floor);
                if (grid.has_truth)
                    pt.rel_error = std::abs(pt.estimate - pt.truth) /
                                   std::max(std::abs(pt.truth), 1e-300);
            }
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::DegenerateGeometry: pt.status = PointStatus::DegenerateGeometry; break;
                case ErrorCode::Underflow: pt.status = PointStatus::Underflow; break;
                default: throw;
            }
        }
        grid.points.push_back(pt);
    }
    return grid;
}

std::vector<double> recover_s_factorized(const ReconstructionGrid& grid,
                                         const AngularPhase& kappa) {
    const double mu = dot(grid.zeta.vec(), grid.eta.vec());
    const double kv = kappa(mu);
    if (!(kv > 0.0))
        fail(ErrorCode::InvalidProfile, "angular profile must be positive at the scan angle");
    std::vector<double> s;
    s.reserve(grid.points.size());
    for (const auto& p : grid.points)
        s.push_back(p.status == PointStatus::Ok ? std::sqrt(std::max(0.0, p.estimate)) / kv : 0.0);
    return s;
}

std::vector<double> xray_line_integrals(const std::vector<double>& ballistic_readings,
                                        double amplitude) {
    if (!(amplitude > 0.0)) fail(ErrorCode::InvalidMeasurement, "amplitude must be positive");
    std::vector<double> out;
    out.reserve(ballistic_readings.size());
    for (double r : ballistic_readings) {
        if (!(r > 0.0))
            fail(ErrorCode::InvalidMeasurement, "nonpositive ballistic reading in X-ray data");
        out.push_back(-std::log(r / amplitude));
    }
    return out;
}

double SigmaGrid::mean_over_ball(const Domain& dom, double radius_fraction) const {
    double sum = 0.0;
    int count = 0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const Vec3 c = lo + Vec3{(ix + 0.5) * cell, (iy + 0.5) * cell, (iz + 0.5) * cell};
                if (norm(c - dom.center()) <= radius_fraction * dom.radius()) {
                    sum += values[(static_cast<size_t>(ix) * n + iy) * n + iz];
                    ++count;
                }
            }
    return count > 0 ? sum / count : 0.0;
}

namespace {

// Exact voxel intersection lengths along a segment (Amanatides-Woo walk).
void traverse_voxels(const SigmaGrid& g, const Vec3& p0, const Vec3& p1,
                     std::vector<std::pair<int, double>>& out) {
    out.clear();
    const Vec3 d = p1 - p0;
    const double len = norm(d);
    if (!(len > 0.0)) return;
    const double extent = g.n * g.cell;
    double t0 = 0.0, t1 = 1.0;
    const double lo_[3] = {g.lo.x, g.lo.y, g.lo.z};
    const double p0_[3] = {p0.x, p0.y, p0.z};
    const double d_[3] = {d.x, d.y, d.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d_[a]) < 1e-15) {
            if (p0_[a] < lo_[a] || p0_[a] > lo_[a] + extent) return;
            continue;
        }
        double ta = (lo_[a] - p0_[a]) / d_[a];
        double tb = (lo_[a] + extent - p0_[a]) / d_[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return;

    constexpr double inf = std::numeric_limits<double>::infinity();
    int idx[3], step[3];
    double tmax[3], tdelta[3];
    for (int a = 0; a < 3; ++a) {
        const double pa = p0_[a] + d_[a] * (t0 + 1e-9 * (t1 - t0));
        idx[a] = std::clamp(static_cast<int>(std::floor((pa - lo_[a]) / g.cell)), 0, g.n - 1);
        if (std::abs(d_[a]) < 1e-15) {
            step[a] = 0;
            tmax[a] = inf;
            tdelta[a] = inf;
        } else if (d_[a] > 0.0) {
            step[a] = 1;
            tmax[a] = (lo_[a] + (idx[a] + 1) * g.cell - p0_[a]) / d_[a];
            tdelta[a] = g.cell / d_[a];
        } else {
            step[a] = -1;
            tmax[a] = (lo_[a] + idx[a] * g.cell - p0_[a]) / d_[a];
            tdelta[a] = -g.cell / d_[a];
        }
    }
    double t = t0;
    while (t < t1 - 1e-12) {
        int a = 0;
        if (tmax[1] < tmax[a]) a = 1;
        if (tmax[2] < tmax[a]) a = 2;
        const double tn = std::min(tmax[a], t1);
        const double seg = (tn - t) * len;
        if (seg > 0.0)
            out.emplace_back((static_cast<size_t>(idx[0]) * g.n + idx[1]) * g.n + idx[2], seg);
        if (tmax[a] >= t1) break;
        t = tmax[a];
        idx[a] += step[a];
        if (idx[a] < 0 || idx[a] >= g.n) break;
        tmax[a] += tdelta[a];
    }
}

}  // namespace

SigmaGrid art_invert_sigma(const std::vector<double>& line_integrals,
                           const std::vector<Chord>& chords, const Domain& dom, int grid_n,
                           const ArtOptions& opts) {
    if (line_integrals.size() != chords.size())
        fail(ErrorCode::InvalidMeasurement, "one line integral per chord required");
    SigmaGrid g;
    g.n = grid_n;
    g.cell = dom.diameter() / grid_n;
    g.lo = dom.center() - Vec3{dom.radius(), dom.radius(), dom.radius()};
    g.values.assign(static_cast<size_t>(grid_n) * grid_n * grid_n, 0.0);
    g.underdetermined = static_cast<int>(chords.size()) < opts.min_chords;

    // precompute row supports once; sweeps reuse them
    std::vector<std::vector<std::pair<int, double>>> rows(chords.size());
    std::vector<double> row_norm2(chords.size(), 0.0);
    std::vector<std::pair<int, double>> scratch;
    for (size_t i = 0; i < chords.size(); ++i) {
        traverse_voxels(g, chords[i].entry, chords[i].exit, scratch);
        rows[i] = scratch;
        double n2 = 0.0;
        for (const auto& [idx, w] : scratch) n2 += w * w;
        row_norm2[i] = n2;
    }

    for (int sweep = 0; sweep < opts.iterations; ++sweep) {
        for (size_t i = 0; i < rows.size(); ++i) {
            if (row_norm2[i] <= 0.0) continue;
            double dot_ = 0.0;
            for (const auto& [idx, w] : rows[i]) dot_ += w * g.values[idx];
            const double corr = opts.relaxation * (line_integrals[i] - dot_) / row_norm2[i];
            for (const auto& [idx, w] : rows[i]) g.values[idx] += corr * w;
        }
        for (double& v : g.values) v = std::max(0.0, v);
    }
    return g;
}

std::vector<Vec3> scan_lattice(const Vec3& center, double half_extent, int n) {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                auto coord = [&](int idx) {
                    return n == 1 ? 0.0 : -half_extent + 2.0 * half_extent * idx / (n - 1);
                };
                pts.push_back(center + Vec3{coord(i), coord(j), coord(k)});
            }
    return pts;
}

}  // namespace bray
