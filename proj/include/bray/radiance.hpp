#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bray/fields.hpp"
#include "bray/geometry.hpp"
#include "bray/quadrature.hpp"

namespace bray {

// Phase-space samples u(x_i, theta_j) on a lattice over the bounding cube of
// the domain, with a shared direction set. Interpolation is trilinear in
// space and nearest-node in direction: angular smoothing would smear exactly
// the narrow features this solver exists to validate.
class RadianceGrid {
public:
    RadianceGrid(const Domain& dom, int nodes_per_axis, std::shared_ptr<const SphereRule> sphere);

    const Domain& domain() const { return dom_; }
    int n() const { return n_; }
    double cell() const { return cell_; }
    const SphereRule& sphere() const { return *sphere_; }
    std::shared_ptr<const SphereRule> sphere_ptr() const { return sphere_; }
    int num_nodes() const { return n_ * n_ * n_; }
    int num_dirs() const { return sphere_->size(); }

    // Nodes whose cells can be touched by interpolation inside the ball.
    bool node_active(int node) const { return active_[node] != 0; }
    // Lattice position, pulled just inside the boundary for shell nodes so
    // transport evaluations stay well defined.
    const Vec3& node_eval_pos(int node) const { return eval_pos_[node]; }
    Vec3 node_lattice_pos(int node) const;

    double value(int node, int dir) const { return values_[idx(node, dir)]; }
    void set_value(int node, int dir, double v) { values_[idx(node, dir)] = v; }
    double* dir_slice(int node) { return values_.data() + idx(node, 0); }
    const double* dir_slice(int node) const { return values_.data() + idx(node, 0); }

    // Trilinear interpolation at fixed direction index.
    double interp(const Vec3& x, int dir) const;
    // Nearest direction node, then trilinear.
    double interp_nearest(const Vec3& x, const Vec3& theta) const;

    double sup_norm() const;
    void fill(double v);

private:
    size_t idx(int node, int dir) const {
        return static_cast<size_t>(node) * num_dirs() + dir;
    }

    Domain dom_;
    int n_;
    double cell_;
    Vec3 lo_;
    std::shared_ptr<const SphereRule> sphere_;
    std::vector<double> values_;
    std::vector<uint8_t> active_;
    std::vector<Vec3> eval_pos_;
};

}  // namespace bray
