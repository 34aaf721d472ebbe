#include "bray/radiance.hpp"

#include <algorithm>
#include <cmath>

#include "bray/errors.hpp"

namespace bray {

RadianceGrid::RadianceGrid(const Domain& dom, int nodes_per_axis,
                           std::shared_ptr<const SphereRule> sphere)
    : dom_(dom), n_(nodes_per_axis), sphere_(std::move(sphere)) {
    if (n_ < 3) fail(ErrorCode::NumericFailure, "radiance grid needs >= 3 nodes per axis");
    const double R = dom_.radius();
    cell_ = 2.0 * R / (n_ - 1);
    lo_ = dom_.center() - Vec3{R, R, R};
    values_.assign(static_cast<size_t>(num_nodes()) * num_dirs(), 0.0);
    active_.resize(num_nodes());
    eval_pos_.resize(num_nodes());
    const double active_radius = R + 1.8 * cell_;
    const double inner_radius = R * (1.0 - 2e-7);
    for (int node = 0; node < num_nodes(); ++node) {
        const Vec3 p = node_lattice_pos(node);
        const double r = norm(p - dom_.center());
        active_[node] = r <= active_radius ? 1 : 0;
        eval_pos_[node] = r <= inner_radius
                              ? p
                              : dom_.center() + normalized(p - dom_.center()) * inner_radius;
    }
}

Vec3 RadianceGrid::node_lattice_pos(int node) const {
    const int iz = node % n_;
    const int iy = (node / n_) % n_;
    const int ix = node / (n_ * n_);
    return lo_ + Vec3{ix * cell_, iy * cell_, iz * cell_};
}

double RadianceGrid::interp(const Vec3& x, int dir) const {
    auto locate = [&](double v, double lo, int& i, double& f) {
        const double t = std::clamp((v - lo) / cell_, 0.0, static_cast<double>(n_ - 1));
        i = std::min(n_ - 2, static_cast<int>(t));
        f = t - i;
    };
    int ix, iy, iz;
    double fx, fy, fz;
    locate(x.x, lo_.x, ix, fx);
    locate(x.y, lo_.y, iy, fy);
    locate(x.z, lo_.z, iz, fz);
    const int nd = num_dirs();
    const double* base = values_.data() + dir;
    auto v = [&](int a, int b, int c) {
        return base[(static_cast<size_t>((a * n_ + b)) * n_ + c) * nd];
    };
    const double c00 = v(ix, iy, iz) * (1 - fx) + v(ix + 1, iy, iz) * fx;
    const double c10 = v(ix, iy + 1, iz) * (1 - fx) + v(ix + 1, iy + 1, iz) * fx;
    const double c01 = v(ix, iy, iz + 1) * (1 - fx) + v(ix + 1, iy, iz + 1) * fx;
    const double c11 = v(ix, iy + 1, iz + 1) * (1 - fx) + v(ix + 1, iy + 1, iz + 1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

double RadianceGrid::interp_nearest(const Vec3& x, const Vec3& theta) const {
    return interp(x, nearest_direction(*sphere_, theta));
}

double RadianceGrid::sup_norm() const {
    double m = 0.0;
    const int nd = num_dirs();
    for (int node = 0; node < num_nodes(); ++node) {
        if (!active_[node]) continue;
        const double* s = dir_slice(node);
        for (int l = 0; l < nd; ++l) m = std::max(m, std::abs(s[l]));
    }
    return m;
}

void RadianceGrid::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

}  // namespace bray
