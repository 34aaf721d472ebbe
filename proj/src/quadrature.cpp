#include "bray/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bray/errors.hpp"

namespace bray {

namespace {

// Newton iteration on Legendre polynomials; standard construction.
GaussRule build_gauss(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1) fail(ErrorCode::NumericFailure, "Gauss rule order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss(order)).first;
    return it->second;
}

double integrate_ray(const std::function<double(double)>& f, double len, const LineRule& rule) {
    if (!(len > 0.0)) return 0.0;
    const GaussRule& g = gauss_legendre(rule.nodes_per_panel);
    const int panels = std::max(1, static_cast<int>(std::ceil(len / rule.max_panel)));
    const double h = len / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        double acc = 0.0;
        for (size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * f(mid + 0.5 * h * g.nodes[i]);
        sum += acc * 0.5 * h;
    }
    return sum;
}

double integrate_segment(const std::function<double(const Vec3&)>& f, const Vec3& p0,
                         const Vec3& p1, const LineRule& rule) {
    const Vec3 d = p1 - p0;
    const double len = norm(d);
    if (!(len > 0.0)) return 0.0;
    const Vec3 u = d / len;
    return integrate_ray([&](double t) { return f(p0 + u * t); }, len, rule);
}

SphereRule fibonacci_sphere(int n) {
    if (n < 1) fail(ErrorCode::NumericFailure, "sphere rule needs at least one node");
    SphereRule rule;
    rule.dirs.reserve(n);
    rule.weight = 4.0 * std::numbers::pi / n;
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * i;
        rule.dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return rule;
}

int nearest_direction(const SphereRule& rule, const Vec3& v) {
    int best = 0;
    double best_dot = -2.0;
    for (int i = 0; i < rule.size(); ++i) {
        const double d = dot(rule.dirs[i], v);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

double integrate_cap(const std::function<double(const Vec3&)>& f, const Vec3& axis,
                     double half_angle, int n_polar, int n_azimuth) {
    if (!(half_angle > 0.0)) return 0.0;
    Vec3 e1, e2;
    orthonormal_frame(axis, e1, e2);
    const GaussRule& g = gauss_legendre(n_polar);
    double sum = 0.0;
    const double dphi = 2.0 * std::numbers::pi / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double beta = 0.5 * half_angle * (g.nodes[i] + 1.0);
        const double wb = 0.5 * half_angle * g.weights[i] * std::sin(beta);
        const double cb = std::cos(beta), sb = std::sin(beta);
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = dphi * j;
            const Vec3 dir = axis * cb + (e1 * std::cos(phi) + e2 * std::sin(phi)) * sb;
            sum += wb * dphi * f(dir);
        }
    }
    return sum;
}

double integrate_sphere_surface_cap(const std::function<double(const Vec3&)>& f,
                                    const Vec3& center, double R, const Vec3& p,
                                    double half_angle, int n_polar, int n_azimuth) {
    const Vec3 axis = normalized(p - center);
    return R * R *
           integrate_cap([&](const Vec3& dir) { return f(center + dir * R); }, axis, half_angle,
                         n_polar, n_azimuth);
}

QuadratureSpec QuadratureSpec::defaults(double domain_radius, int sphere_nodes) {
    QuadratureSpec q;
    q.line = LineRule{0.01 * domain_radius, 4};
    q.sphere = fibonacci_sphere(sphere_nodes);
    return q;
}

}  // namespace bray
