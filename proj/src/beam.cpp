#include "bray/beam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bray/errors.hpp"
#include "bray/transport.hpp"

namespace bray {

double bump(double r) {
    if (!(r < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double chord_to_angle(double chord) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

double BeamSpec::amplitude() const {
    const double e3 = epsilon * epsilon * epsilon;
    return gain * (cls == BeamClass::DeltaNormalized ? 1.0 / e3 : 1.0);
}

double BeamSpec::boundary_value(const Vec3& position, const Vec3& direction) const {
    return amplitude() * bump(norm(position - base.position) / epsilon) *
           bump(norm(direction - base.direction.vec()) / epsilon);
}

BeamQuadrature BeamQuadrature::fine(const QuadratureSpec& q) {
    BeamQuadrature bq;
    bq.attenuation_rule = q.line;
    return bq;
}

BeamQuadrature BeamQuadrature::coarse(const QuadratureSpec& q) {
    BeamQuadrature bq;
    bq.attenuation_rule = LineRule{5.0 * q.line.max_panel, q.line.nodes_per_panel};
    bq.cap_polar = 10;
    bq.cap_azimuth = 20;
    bq.window_panels_min = 8;
    bq.window_panels_max = 48;
    return bq;
}

double ballistic_reading(const Domain& dom, const ScalarField& sigma, const BeamSpec& beam,
                         const Vec3& endpoint, const Vec3& out_dir, const LineRule& rule) {
    const double len = exit_distance(dom, endpoint, -out_dir);
    if (!(len > 0.0)) return 0.0;
    const Vec3 entry = dom.snap_to_boundary(endpoint - out_dir * len);
    const double src = beam.boundary_value(entry, out_dir);
    if (src == 0.0) return 0.0;
    return attenuation(dom, sigma, endpoint, entry, rule) * src;
}

double single_scatter_reading(const Domain& dom, const ScalarField& sigma_in,
                              const ScalarField& sigma_out, const KernelFn& kernel,
                              const Vec3& spot, const Vec3& beam_dir, double eps, double amplitude,
                              const Vec3& endpoint, const Vec3& out_dir,
                              const BeamQuadrature& bq) {
    const double L = exit_distance(dom, endpoint, -out_dir);
    if (!(L > 0.0)) return 0.0;

    // Collision points must sit inside the beam tube: any point reachable from
    // the spot within the profile supports lies within eps*(1 + diameter) of
    // the beam axis.
    const double r_tube = eps * (1.0 + dom.diameter()) * 1.05;
    auto perp = [&](const Vec3& w) { return w - beam_dir * dot(w, beam_dir); };
    const Vec3 q0 = perp(endpoint - spot);
    const Vec3 qd = perp(out_dir);  // q(t) = q0 - t*qd
    double t_lo = 0.0, t_hi = L;
    const double a2 = norm2(qd);
    if (a2 > 1e-18) {
        const double b = dot(q0, qd);
        const double c = norm2(q0) - r_tube * r_tube;
        const double disc = b * b - a2 * c;
        if (disc <= 0.0) return 0.0;
        const double sq = std::sqrt(disc);
        t_lo = std::max(0.0, (b - sq) / a2);
        t_hi = std::min(L, (b + sq) / a2);
        if (!(t_hi > t_lo)) return 0.0;
    } else if (norm2(q0) > r_tube * r_tube) {
        return 0.0;
    }

    const double width = t_hi - t_lo;
    const int panels =
        std::clamp(static_cast<int>(std::ceil(width / (bq.window_panel_frac * eps))),
                   bq.window_panels_min, bq.window_panels_max);
    const GaussRule& g = gauss_legendre(4);
    const double h = width / panels;

    const double r_dir = chord_to_angle(eps) * 1.05;
    const Vec3 nu_a = dom.outward_normal(spot);
    const double half_pi = 0.5 * std::numbers::pi;

    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            const double t = t_lo + (p + 0.5 + 0.5 * g.nodes[i]) * h;
            const double tw = 0.5 * h * g.weights[i];
            const Vec3 y = endpoint - out_dir * t;

            const Vec3 to_y = y - spot;
            const double ell = norm(to_y);
            Vec3 omega = beam_dir;
            double d_angle = 0.0;
            if (ell > 1e-12) {
                omega = to_y / ell;
                d_angle = chord_to_angle(norm(omega - beam_dir));
            }
            // angular spread of directions whose backward entry stays within
            // the spot; grazing incidence tightens it
            const double grazing = std::abs(dot(nu_a, omega));
            const double r_spot =
                bq.support_margin * eps * std::max(grazing, 0.02) / std::max(ell, 1e-9);
            if (d_angle > r_dir + r_spot) continue;
            const double delta = std::min({r_spot, d_angle + r_dir, half_pi});
            if (!(delta > 0.0)) continue;

            const double alpha_out = attenuation(dom, sigma_out, endpoint, y, bq.attenuation_rule);
            const double inner = integrate_cap(
                [&](const Vec3& th) {
                    const double w_dir = bump(norm(th - beam_dir) / eps);
                    if (w_dir == 0.0) return 0.0;
                    const double s_len = exit_distance(dom, y, -th);
                    const Vec3 z = dom.snap_to_boundary(y - th * s_len);
                    const double w_spot = bump(norm(z - spot) / eps);
                    if (w_spot == 0.0) return 0.0;
                    return w_dir * w_spot * kernel(y, out_dir, th) *
                           attenuation(dom, sigma_in, y, z, bq.attenuation_rule);
                },
                omega, delta, bq.cap_polar, bq.cap_azimuth);
            acc += tw * alpha_out * inner;
        }
    }
    return amplitude * acc;
}

double delta_normalization(const Domain& dom, const Vec3& spot, const Vec3& beam_dir, double eps,
                           const Vec3& endpoint, const Vec3& out_dir, const BeamQuadrature& bq) {
    const ScalarField vacuum = ScalarField::constant(0.0);
    const KernelFn unit = [](const Vec3&, const Vec3&, const Vec3&) { return 1.0; };
    const double e3 = eps * eps * eps;
    return single_scatter_reading(dom, vacuum, vacuum, unit, spot, beam_dir, eps, 1.0 / e3,
                                  endpoint, out_dir, bq);
}

CollisionBreakdown measure_collision_terms(const CoefficientSet& coeffs, const BeamSpec& beam,
                                           const BoundaryPoint& exit, const BeamQuadrature& bq) {
    if (beam.base.side != BoundarySide::Inflow)
        fail(ErrorCode::InvalidMeasurement, "beam base must lie on the inflow boundary");
    if (exit.side != BoundarySide::Outflow)
        fail(ErrorCode::InvalidMeasurement, "detector must lie on the outflow boundary");

    const Domain& dom = coeffs.domain();
    const ScalarField& sigma = coeffs.sigma_field();
    CollisionBreakdown out;
    out.ballistic =
        ballistic_reading(dom, sigma, beam, exit.position, exit.direction.vec(), bq.attenuation_rule);

    const KernelFn k = [&](const Vec3& x, const Vec3& od, const Vec3& id) {
        return coeffs.kernel()(x, od, id);
    };
    const double raw = single_scatter_reading(dom, sigma, sigma, k, beam.base.position,
                                              beam.base.direction.vec(), beam.epsilon,
                                              beam.amplitude(), exit.position,
                                              exit.direction.vec(), bq);
    if (beam.cls == BeamClass::DeltaNormalized) {
        // raw carries the beam amplitude (gain included); the probe carries the
        // bare eps^-3, so the quotient is the gain-scaled renormalized reading.
        const double n = delta_normalization(dom, beam.base.position, beam.base.direction.vec(),
                                             beam.epsilon, exit.position, exit.direction.vec(),
                                             bq);
        out.single_scatter = n > 0.0 ? raw / n : 0.0;
    } else {
        out.single_scatter = raw;
    }

    out.contraction = contraction_constant(coeffs);
    out.tail_bound = out.contraction * out.contraction / (1.0 - out.contraction) *
                     beam.amplitude();
    return out;
}

double multi_collision_tail_estimate(const CoefficientSet& coeffs, const BeamSpec& beam,
                                     int cap_polar, int cap_azimuth) {
    const Domain& dom = coeffs.domain();
    const double eps = beam.epsilon;
    const double R = dom.radius();
    const double spot_half = chord_to_angle(std::min(2.0, eps / R)) * 1.05;
    const double spot_mass = integrate_sphere_surface_cap(
        [&](const Vec3& p) { return bump(norm(p - beam.base.position) / eps); }, dom.center(), R,
        beam.base.position, spot_half, cap_polar, cap_azimuth);
    const double dir_mass = integrate_cap(
        [&](const Vec3& th) { return bump(norm(th - beam.base.direction.vec()) / eps); },
        beam.base.direction.vec(), chord_to_angle(eps) * 1.05, cap_polar, cap_azimuth);
    const double c = contraction_constant(coeffs);
    return c * c / (1.0 - c) * beam.amplitude() * spot_mass * dir_mass;
}

}  // namespace bray
