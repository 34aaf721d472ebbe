#include "bray/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bray/errors.hpp"

namespace bray {

double TabulatedGrid::at(const Vec3& x) const {
    auto cell = [](double v, double lo, double hi, int n, int& i, double& f) {
        const double t = (v - lo) / (hi - lo) * (n - 1);
        const double tc = std::clamp(t, 0.0, static_cast<double>(n - 1));
        i = std::min(n - 2, static_cast<int>(tc));
        f = tc - i;
    };
    int ix, iy, iz;
    double fx, fy, fz;
    cell(x.x, lo.x, hi.x, nx, ix, fx);
    cell(x.y, lo.y, hi.y, ny, iy, fy);
    cell(x.z, lo.z, hi.z, nz, iz, fz);
    auto v = [&](int a, int b, int c) { return values[(static_cast<size_t>(a) * ny + b) * nz + c]; };
    const double c00 = v(ix, iy, iz) * (1 - fx) + v(ix + 1, iy, iz) * fx;
    const double c10 = v(ix, iy + 1, iz) * (1 - fx) + v(ix + 1, iy + 1, iz) * fx;
    const double c01 = v(ix, iy, iz + 1) * (1 - fx) + v(ix + 1, iy, iz + 1) * fx;
    const double c11 = v(ix, iy + 1, iz + 1) * (1 - fx) + v(ix + 1, iy + 1, iz + 1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

ScalarField ScalarField::constant(double value) {
    if (value < 0.0) fail(ErrorCode::NumericFailure, "constant field value must be >= 0");
    ScalarField f;
    f.kind_ = Kind::Constant;
    f.value_ = value;
    return f;
}

ScalarField ScalarField::blobs(std::vector<GaussianBlob> blobs, double offset) {
    if (offset < 0.0) fail(ErrorCode::NumericFailure, "blob field offset must be >= 0");
    for (const auto& b : blobs) {
        if (b.amplitude < 0.0) fail(ErrorCode::NumericFailure, "blob amplitude must be >= 0");
        if (!(b.width > 0.0)) fail(ErrorCode::NumericFailure, "blob width must be > 0");
    }
    ScalarField f;
    f.kind_ = Kind::Blobs;
    f.offset_ = offset;
    f.blobs_ = std::move(blobs);
    return f;
}

ScalarField ScalarField::tabulated(TabulatedGrid grid) {
    if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
        fail(ErrorCode::NumericFailure, "tabulated field needs at least 2 nodes per axis");
    if (grid.values.size() != static_cast<size_t>(grid.nx) * grid.ny * grid.nz)
        fail(ErrorCode::NumericFailure, "tabulated field value count does not match dimensions");
    for (double v : grid.values)
        if (v < 0.0) fail(ErrorCode::NumericFailure, "tabulated field values must be >= 0");
    ScalarField f;
    f.kind_ = Kind::Tabulated;
    f.grid_ = std::make_shared<TabulatedGrid>(std::move(grid));
    return f;
}

double ScalarField::operator()(const Vec3& x) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Blobs: {
            double s = offset_;
            for (const auto& b : blobs_) {
                const double r2 = norm2(x - b.center);
                s += b.amplitude * std::exp(-0.5 * r2 / (b.width * b.width));
            }
            return s;
        }
        case Kind::Tabulated: return grid_->at(x);
    }
    return 0.0;
}

double ScalarField::upper_bound() const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Blobs: {
            double s = offset_;
            for (const auto& b : blobs_) s += b.amplitude;
            return s;
        }
        case Kind::Tabulated: {
            double m = 0.0;
            for (double v : grid_->values) m = std::max(m, v);
            return m;  // trilinear interpolation never exceeds node values
        }
    }
    return 0.0;
}

std::string ScalarField::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Constant: os << "constant(" << value_ << ")"; break;
        case Kind::Blobs: os << "blobs(n=" << blobs_.size() << ", offset=" << offset_ << ")"; break;
        case Kind::Tabulated:
            os << "tabulated(" << grid_->nx << "x" << grid_->ny << "x" << grid_->nz << ")";
            break;
    }
    return os.str();
}

AngularPhase AngularPhase::isotropic() { return AngularPhase{}; }

AngularPhase AngularPhase::henyey_greenstein(double g) {
    if (!(g > -1.0 && g < 1.0))
        fail(ErrorCode::InvalidProfile, "Henyey-Greenstein parameter g must lie in (-1, 1)");
    AngularPhase p;
    p.kind_ = Kind::HenyeyGreenstein;
    p.g_ = g;
    return p;
}

double AngularPhase::operator()(double mu) const {
    constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);
    switch (kind_) {
        case Kind::Isotropic: return inv4pi;
        case Kind::HenyeyGreenstein: {
            const double denom = 1.0 + g_ * g_ - 2.0 * g_ * mu;
            return inv4pi * (1.0 - g_ * g_) / (denom * std::sqrt(denom));
        }
    }
    return 0.0;
}

double AngularPhase::sphere_integral(int gauss_order) const {
    const GaussRule& g = gauss_legendre(gauss_order);
    double s = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * (*this)(g.nodes[i]);
    return 2.0 * std::numbers::pi * s;
}

std::string AngularPhase::describe() const {
    if (kind_ == Kind::Isotropic) return "isotropic";
    std::ostringstream os;
    os << "henyey-greenstein(g=" << g_ << ")";
    return os.str();
}

CoefficientSet::CoefficientSet(Domain domain, ScalarField sigma, ScatteringKernel kernel)
    : domain_(domain), sigma_(std::move(sigma)), kernel_(std::move(kernel)) {
    const auto report = check_subcriticality(domain_, sigma_, kernel_,
                                             default_subcriticality_samples(domain_));
    if (!report.passed)
        fail(ErrorCode::SubcriticalityViolation,
             "scattering would generate light: max (integral k)/sigma = " +
                 std::to_string(report.max_ratio));
}

double CoefficientSet::sigma(const Vec3& x) const {
    if (!domain_.contains(x))
        fail(ErrorCode::DomainViolation, "sigma evaluated outside the closed domain");
    return sigma_(x);
}

double CoefficientSet::k(const Vec3& x, const Vec3& theta, const Vec3& theta_prime) const {
    if (!domain_.contains(x))
        fail(ErrorCode::DomainViolation, "kernel evaluated outside the closed domain");
    return kernel_(x, theta, theta_prime);
}

SubcriticalityReport check_subcriticality(const Domain& dom, const ScalarField& sigma,
                                          const ScatteringKernel& kernel,
                                          const std::vector<Vec3>& sample_points,
                                          int gauss_order) {
    if (gauss_order < 64)
        fail(ErrorCode::NumericFailure, "subcriticality quadrature needs >= 64 nodes");
    const double angular_mass = kernel.angular.sphere_integral(gauss_order);
    SubcriticalityReport report;
    report.worst_point = dom.center();
    for (const Vec3& x : sample_points) {
        const double total_k = kernel.spatial(x) * angular_mass;
        const double sig = sigma(x);
        if (sig <= 0.0) {
            if (total_k > 0.0)
                fail(ErrorCode::SubcriticalityViolation,
                     "sigma vanishes where the kernel scatters");
            continue;
        }
        const double ratio = total_k / sig;
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.worst_point = x;
        }
    }
    report.passed = report.max_ratio <= 1.0 + 1e-9;
    return report;
}

std::vector<Vec3> default_subcriticality_samples(const Domain& dom, int per_axis) {
    std::vector<Vec3> pts;
    const double R = dom.radius();
    const Vec3 c = dom.center();
    pts.push_back(c);
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j)
            for (int k = 0; k < per_axis; ++k) {
                const Vec3 p = c + Vec3{-R + 2.0 * R * i / (per_axis - 1),
                                        -R + 2.0 * R * j / (per_axis - 1),
                                        -R + 2.0 * R * k / (per_axis - 1)};
                if (norm(p - c) <= R) pts.push_back(p);
            }
    // near-boundary probes along the axes
    for (const Vec3& u : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}) {
        pts.push_back(c + u * (0.99 * R));
        pts.push_back(c - u * (0.99 * R));
    }
    return pts;
}

}  // namespace bray
