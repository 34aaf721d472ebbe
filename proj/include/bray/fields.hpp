#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bray/geometry.hpp"
#include "bray/quadrature.hpp"
#include "bray/vec3.hpp"

namespace bray {

// One Gaussian bump: amp * exp(-|x-center|^2 / (2 width^2)).
struct GaussianBlob {
    Vec3 center;
    double width = 0.3;
    double amplitude = 1.0;
};

// Axis-aligned grid of samples with trilinear interpolation.
struct TabulatedGrid {
    Vec3 lo, hi;   // bounding box
    int nx = 2, ny = 2, nz = 2;
    std::vector<double> values;  // x-major: ((ix*ny)+iy)*nz+iz

    double at(const Vec3& x) const;
};

// Nonnegative continuous scalar profile; serves both the absorption
// coefficient and the spatial factor of the scattering kernel.
class ScalarField {
public:
    static ScalarField constant(double value);
    static ScalarField blobs(std::vector<GaussianBlob> blobs, double offset = 0.0);
    static ScalarField tabulated(TabulatedGrid grid);

    double operator()(const Vec3& x) const;
    // Sup bound over all of space; for blob sums the bound is offset + sum of
    // amplitudes, which is what the contraction estimate needs.
    double upper_bound() const;
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return value_; }

    std::string describe() const;

private:
    enum class Kind { Constant, Blobs, Tabulated };
    Kind kind_ = Kind::Constant;
    double value_ = 0.0;
    double offset_ = 0.0;
    std::vector<GaussianBlob> blobs_;
    std::shared_ptr<const TabulatedGrid> grid_;
};

// Angular factor kappa(theta . theta'). Both built-in kinds integrate to 1
// over the sphere, so the spatial factor s(x) is the total scattering
// cross-section and subcriticality reads sigma(x) >= s(x).
class AngularPhase {
public:
    static AngularPhase isotropic();
    static AngularPhase henyey_greenstein(double g);

    double operator()(double mu) const;  // mu = cos of scattering angle
    // 2*pi * integral of kappa(mu) dmu over [-1,1], by dense Gauss quadrature.
    double sphere_integral(int gauss_order = 128) const;

    bool is_isotropic() const { return kind_ == Kind::Isotropic; }
    double g() const { return g_; }
    std::string describe() const;

private:
    enum class Kind { Isotropic, HenyeyGreenstein };
    Kind kind_ = Kind::Isotropic;
    double g_ = 0.0;
};

// k(x, theta, theta') = s(x) * kappa(theta . theta'). Symmetry in the two
// directions and rotation invariance are automatic in this form.
struct ScatteringKernel {
    ScalarField spatial;   // s(x)
    AngularPhase angular;  // kappa

    double operator()(const Vec3& x, const Vec3& theta, const Vec3& theta_prime) const {
        return spatial(x) * angular(dot(theta, theta_prime));
    }
};

struct SubcriticalityReport {
    double max_ratio = 0.0;  // max over samples of (integral of k dtheta) / sigma
    Vec3 worst_point;
    bool passed = false;
};

// Absorption + scattering over a domain. Construction validates
// subcriticality and fails fast on violation.
class CoefficientSet {
public:
    CoefficientSet(Domain domain, ScalarField sigma, ScatteringKernel kernel);

    const Domain& domain() const { return domain_; }
    const ScalarField& sigma_field() const { return sigma_; }
    const ScatteringKernel& kernel() const { return kernel_; }

    // Evaluations with containment checks (closed domain).
    double sigma(const Vec3& x) const;
    double k(const Vec3& x, const Vec3& theta, const Vec3& theta_prime) const;

    double sigma_upper_bound() const { return sigma_.upper_bound(); }

private:
    Domain domain_;
    ScalarField sigma_;
    ScatteringKernel kernel_;
};

// max over sample points of (sphere integral of k) / sigma; passes iff
// <= 1 + 1e-9. For the factorized kernel the sphere integral reduces exactly
// to s(x) times the angular sphere integral, computed by >= 64-node Gauss
// quadrature in the scattering cosine.
SubcriticalityReport check_subcriticality(const Domain& dom, const ScalarField& sigma,
                                          const ScatteringKernel& kernel,
                                          const std::vector<Vec3>& sample_points,
                                          int gauss_order = 128);

// Deterministic default sample set: lattice restricted to the ball plus the
// center and near-boundary probes.
std::vector<Vec3> default_subcriticality_samples(const Domain& dom, int per_axis = 7);

}  // namespace bray
