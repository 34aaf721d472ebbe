#include "bray/multifreq.hpp"

#include <cmath>

#include "bray/errors.hpp"

namespace bray {

MultiFreqCoefficients::MultiFreqCoefficients(Domain domain, ScalarField sigma_e,
                                             ScalarField sigma_f, ScatteringKernel kernel)
    : domain_(domain),
      sigma_e_(std::move(sigma_e)),
      sigma_f_(std::move(sigma_f)),
      kernel_(std::move(kernel)) {
    const auto report = check_subcriticality(domain_, sigma_e_, kernel_,
                                             default_subcriticality_samples(domain_));
    if (!report.passed)
        fail(ErrorCode::SubcriticalityViolation,
             "excitation absorption does not dominate scattering: max ratio " +
                 std::to_string(report.max_ratio));
}

MFBoundaryCondition mf_condition(const Domain& dom, int index, const RayConstruction& rays,
                                 double eps, double gain) {
    if (index < 1 || index > 8)
        fail(ErrorCode::InvalidMeasurement, "boundary condition index must lie in 1..8");
    const Vec3 zeta = rays.zeta.vec(), eta = rays.eta.vec();
    struct Src {
        Vec3 spot, axis;
        BeamClass cls;
        bool fluorescent;  // source enters at the post-collision frequency
    };
    const Src table[8] = {
        {rays.a, zeta, BeamClass::DeltaNormalized, false},
        {rays.b, eta, BeamClass::DeltaNormalized, false},
        {rays.c, -zeta, BeamClass::DeltaNormalized, false},
        {rays.d, -eta, BeamClass::DeltaNormalized, false},
        {rays.a, zeta, BeamClass::Unit, false},
        {rays.b, eta, BeamClass::Unit, false},
        {rays.a, zeta, BeamClass::Unit, true},
        {rays.b, eta, BeamClass::Unit, true},
    };
    const Src& src = table[index - 1];
    const BeamSpec beam{BoundaryPoint::classify(dom, src.spot, Direction(src.axis)), eps, src.cls,
                        gain};

    MFBoundaryCondition bc;
    bc.index = index;
    const auto beam_fn = [beam](const Vec3& p, const Vec3& d) { return beam.boundary_value(p, d); };
    if (src.fluorescent) {
        bc.psi = beam_fn;
        bc.psi_beam = beam;
    } else {
        bc.phi = beam_fn;
        bc.phi_beam = beam;
    }
    return bc;
}

BoundaryPoint mf_detector(const Domain& dom, int index, const RayConstruction& rays) {
    const Vec3 zeta = rays.zeta.vec(), eta = rays.eta.vec();
    switch (index) {
        case 1: return BoundaryPoint::classify(dom, rays.d, Direction(eta));
        case 2: return BoundaryPoint::classify(dom, rays.c, Direction(zeta));
        case 3: return BoundaryPoint::classify(dom, rays.b, Direction(-eta));
        case 4: return BoundaryPoint::classify(dom, rays.a, Direction(-zeta));
        case 5: return BoundaryPoint::classify(dom, rays.c, Direction(zeta));
        case 6: return BoundaryPoint::classify(dom, rays.d, Direction(eta));
        case 7: return BoundaryPoint::classify(dom, rays.c, Direction(zeta));
        case 8: return BoundaryPoint::classify(dom, rays.d, Direction(eta));
    }
    fail(ErrorCode::InvalidMeasurement, "boundary condition index must lie in 1..8");
}

MFReading solve_multifreq(const MultiFreqCoefficients& coeffs, const MFBoundaryCondition& bc,
                          const BoundaryPoint& exit, const QuadratureSpec& quad,
                          const BeamQuadrature& bq) {
    const Domain& dom = coeffs.domain();
    if (exit.side != BoundarySide::Outflow)
        fail(ErrorCode::InvalidMeasurement, "multifrequency reading point must be outflow");
    const Vec3 p = exit.position;
    const Vec3 eta = exit.direction.vec();
    const double len = exit_distance(dom, p, -eta);
    const Vec3 entry = dom.snap_to_boundary(p - eta * len);

    MFReading out;

    // u = J_e phi
    if (bc.phi_beam) {
        out.u = ballistic_reading(dom, coeffs.sigma_e(), *bc.phi_beam, p, eta, bq.attenuation_rule);
    } else if (bc.phi) {
        out.u = attenuation(dom, coeffs.sigma_e(), p, entry, quad.line) * bc.phi(entry, eta);
    }

    // v = J_f psi + T_f^-1 K J_e phi
    if (bc.psi_beam) {
        out.v = ballistic_reading(dom, coeffs.sigma_f(), *bc.psi_beam, p, eta, bq.attenuation_rule);
    } else if (bc.psi) {
        out.v = attenuation(dom, coeffs.sigma_f(), p, entry, quad.line) * bc.psi(entry, eta);
    }
    if (bc.phi_beam) {
        const BeamSpec& beam = *bc.phi_beam;
        const KernelFn k = [&](const Vec3& x, const Vec3& od, const Vec3& id) {
            return coeffs.kernel()(x, od, id);
        };
        const double raw = single_scatter_reading(dom, coeffs.sigma_e(), coeffs.sigma_f(), k,
                                                  beam.base.position, beam.base.direction.vec(),
                                                  beam.epsilon, beam.amplitude(), p, eta, bq);
        if (beam.cls == BeamClass::DeltaNormalized) {
            const double n = delta_normalization(dom, beam.base.position,
                                                 beam.base.direction.vec(), beam.epsilon, p, eta,
                                                 bq);
            out.v += n > 0.0 ? raw / n : 0.0;
        } else {
            out.v += raw;
        }
    } else if (bc.phi) {
        auto u_field = [&](const Vec3& y, const Vec3& d) {
            const double l = exit_distance(dom, y, -d);
            const Vec3 e = dom.snap_to_boundary(y - d * l);
            return attenuation(dom, coeffs.sigma_e(), y, e, quad.line) * bc.phi(e, d);
        };
        out.v += integrate_ray(
            [&](double t) {
                const Vec3 y = p - eta * t;
                double acc = 0.0;
                for (const Vec3& d : quad.sphere.dirs)
                    acc += coeffs.kernel().angular(dot(eta, d)) * u_field(y, d);
                const double source = coeffs.kernel().spatial(y) * acc * quad.sphere.weight;
                return attenuation(dom, coeffs.sigma_f(), p, y, quad.line) * source;
            },
            len, quad.line);
    }
    return out;
}

MfTuple analytic_mf_measurements(const MultiFreqCoefficients& coeffs, const RayConstruction& rays,
                                 const LineRule& rule) {
    const Domain& dom = coeffs.domain();
    const Vec3 x = rays.x;
    const Vec3 zeta = rays.zeta.vec();
    const Vec3 eta = rays.eta.vec();
    auto ae = [&](const Vec3& u, const Vec3& v) {
        return attenuation(dom, coeffs.sigma_e(), u, v, rule);
    };
    auto af = [&](const Vec3& u, const Vec3& v) {
        return attenuation(dom, coeffs.sigma_f(), u, v, rule);
    };
    const ScatteringKernel& k = coeffs.kernel();

    MfTuple m;
    m[0] = ae(rays.a, x) * k(x, zeta, eta) * af(x, rays.d);
    m[1] = ae(rays.b, x) * k(x, eta, zeta) * af(x, rays.c);
    m[2] = ae(rays.c, x) * k(x, -zeta, -eta) * af(x, rays.b);
    m[3] = ae(rays.d, x) * k(x, -eta, -zeta) * af(x, rays.a);
    m[4] = ae(rays.a, rays.c);
    m[5] = ae(rays.b, rays.d);
    m[6] = af(rays.a, rays.c);
    m[7] = af(rays.b, rays.d);
    return m;
}

MfTuple simulate_mf_tuple(const MultiFreqCoefficients& coeffs, const RayConstruction& rays,
                          double eps, double gain, const BeamQuadrature& bq) {
    const Domain& dom = coeffs.domain();
    QuadratureSpec quad;  // beam conditions never touch the sphere rule
    quad.line = bq.attenuation_rule;
    quad.sphere = fibonacci_sphere(1);
    MfTuple m;
    for (int j = 1; j <= 8; ++j) {
        const MFBoundaryCondition bc = mf_condition(dom, j, rays, eps, gain);
        const MFReading r = solve_multifreq(coeffs, bc, mf_detector(dom, j, rays), quad, bq);
        m[j - 1] = (j == 5 || j == 6) ? r.u : r.v;
    }
    return m;
}

}  // namespace bray
