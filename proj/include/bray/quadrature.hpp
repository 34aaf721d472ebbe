#pragma once

#include <functional>
#include <vector>

#include "bray/vec3.hpp"

namespace bray {

// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Composite Gauss-Legendre along a segment: panels no longer than max_panel,
// nodes_per_panel Gauss points each (4 points integrate degree-7 exactly).
struct LineRule {
    double max_panel = 0.01;
    int nodes_per_panel = 4;
};

double integrate_segment(const std::function<double(const Vec3&)>& f, const Vec3& p0,
                         const Vec3& p1, const LineRule& rule);

// Same rule parameterized by arc length t in [0, len] along p0 + t*dir.
double integrate_ray(const std::function<double(double)>& f, double len, const LineRule& rule);

// Equal-weight spherical Fibonacci node set; weights sum to 4*pi exactly by
// construction (N copies of 4*pi/N).
struct SphereRule {
    std::vector<Vec3> dirs;
    double weight = 0.0;  // common weight 4*pi/N

    int size() const { return static_cast<int>(dirs.size()); }
};
SphereRule fibonacci_sphere(int n);

// Index of the rule direction closest to v.
int nearest_direction(const SphereRule& rule, const Vec3& v);

// Integral over the spherical cap of half-angle `half_angle` around `axis`:
// Gauss in the polar angle, trapezoid in azimuth (periodic, so spectral).
double integrate_cap(const std::function<double(const Vec3&)>& f, const Vec3& axis,
                     double half_angle, int n_polar, int n_azimuth);

// Surface integral over the boundary cap of a sphere (radius R around center),
// centered at surface point p, out to polar half-angle `half_angle`.
double integrate_sphere_surface_cap(const std::function<double(const Vec3&)>& f,
                                    const Vec3& center, double R, const Vec3& p,
                                    double half_angle, int n_polar, int n_azimuth);

// Bundle used across transport: one rule for chords, one for the sphere.
struct QuadratureSpec {
    LineRule line;
    SphereRule sphere;

    static QuadratureSpec defaults(double domain_radius, int sphere_nodes = 256);
};

}  // namespace bray
