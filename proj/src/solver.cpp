#include "bray/solver.hpp"

#include <cmath>

#include "bray/errors.hpp"

namespace bray {

namespace {

std::vector<double> kappa_matrix(const AngularPhase& kappa, const SphereRule& sphere) {
    const int nd = sphere.size();
    std::vector<double> m(static_cast<size_t>(nd) * nd);
    for (int j = 0; j < nd; ++j)
        for (int l = 0; l < nd; ++l)
            m[static_cast<size_t>(j) * nd + l] = kappa(dot(sphere.dirs[j], sphere.dirs[l]));
    return m;
}

// Attenuated line integral of the interpolated source along the backward
// chord from x in direction d (a rule direction, so the direction index is
// exact). Constant sigma gets multiplicative recurrences; general sigma
// accumulates optical depth panel by panel.
double chord_integral(const Domain& dom, const ScalarField& sigma, const RadianceGrid& source,
                      int dir_index, const Vec3& x, const Vec3& d, const LineRule& rule) {
    const double len = exit_distance(dom, x, -d);
    if (!(len > 0.0)) return 0.0;
    const GaussRule& g = gauss_legendre(rule.nodes_per_panel);
    const int npp = rule.nodes_per_panel;
    const int panels = std::max(1, static_cast<int>(std::ceil(len / rule.max_panel)));
    const double h = len / panels;
    double acc = 0.0;
    if (sigma.is_constant()) {
        const double s0 = sigma.constant_value();
        const double panel_factor = std::exp(-s0 * h);
        double alpha_panel = 1.0;
        double node_factor[32];
        double node_weight[32];
        double node_t[32];
        for (int i = 0; i < npp; ++i) {
            node_t[i] = 0.5 * h * (1.0 + g.nodes[i]);
            node_factor[i] = std::exp(-s0 * node_t[i]);
            node_weight[i] = 0.5 * h * g.weights[i];
        }
        for (int p = 0; p < panels; ++p) {
            const double t0 = p * h;
            for (int i = 0; i < npp; ++i) {
                const double t = t0 + node_t[i];
                acc += node_weight[i] * alpha_panel * node_factor[i] *
                       source.interp(x - d * t, dir_index);
            }
            alpha_panel *= panel_factor;
        }
    } else {
        const GaussRule& g2 = gauss_legendre(2);
        double tau = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double t0 = p * h;
            for (int i = 0; i < npp; ++i) {
                const double t = t0 + 0.5 * h * (1.0 + g.nodes[i]);
                // optical depth from the panel start to this node
                const double half = 0.5 * (t - t0);
                double dtau = 0.0;
                for (int q = 0; q < 2; ++q) {
                    const double ts = t0 + half * (1.0 + g2.nodes[q]);
                    dtau += half * g2.weights[q] * sigma(x - d * ts);
                }
                acc += 0.5 * h * g.weights[i] * std::exp(-(tau + dtau)) *
                       source.interp(x - d * t, dir_index);
            }
            double panel_tau = 0.0;
            for (int i = 0; i < npp; ++i) {
                const double ts = t0 + 0.5 * h * (1.0 + g.nodes[i]);
                panel_tau += 0.5 * h * g.weights[i] * sigma(x - d * ts);
            }
            tau += panel_tau;
        }
    }
    return acc;
}

double ballistic_value(const Domain& dom, const ScalarField& sigma, const BoundaryFunction& f,
                       const Vec3& x, const Vec3& d, const LineRule& rule) {
    const double dist = exit_distance(dom, x, -d);
    const Vec3 entry = dom.snap_to_boundary(x - d * dist);
    double alpha;
    if (sigma.is_constant()) {
        alpha = std::exp(-sigma.constant_value() * dist);
    } else {
        alpha = attenuation(dom, sigma, x, x - d * dist, rule);
    }
    return alpha * f(entry, d);
}

}  // namespace

void grid_apply_K(const CoefficientSet& coeffs, const RadianceGrid& u, RadianceGrid& out) {
    const SphereRule& sphere = u.sphere();
    const int nd = sphere.size();
    const std::vector<double> m = kappa_matrix(coeffs.kernel().angular, sphere);
    const double w = sphere.weight;
    for (int node = 0; node < u.num_nodes(); ++node) {
        double* o = out.dir_slice(node);
        if (!u.node_active(node)) {
            for (int j = 0; j < nd; ++j) o[j] = 0.0;
            continue;
        }
        const double s = coeffs.kernel().spatial(u.node_eval_pos(node)) * w;
        const double* in = u.dir_slice(node);
        for (int j = 0; j < nd; ++j) {
            const double* row = m.data() + static_cast<size_t>(j) * nd;
            double acc = 0.0;
            for (int l = 0; l < nd; ++l) acc += row[l] * in[l];
            o[j] = s * acc;
        }
    }
}

void grid_apply_Tinv(const CoefficientSet& coeffs, const RadianceGrid& source,
                     const LineRule& rule, RadianceGrid& out) {
    const SphereRule& sphere = source.sphere();
    const int nd = sphere.size();
    for (int node = 0; node < source.num_nodes(); ++node) {
        double* o = out.dir_slice(node);
        if (!source.node_active(node)) {
            for (int j = 0; j < nd; ++j) o[j] = 0.0;
            continue;
        }
        const Vec3 x = source.node_eval_pos(node);
        for (int j = 0; j < nd; ++j)
            o[j] = chord_integral(coeffs.domain(), coeffs.sigma_field(), source, j, x,
                                  sphere.dirs[j], rule);
    }
}

SolveResult solve_rte_neumann(const CoefficientSet& coeffs, const BoundaryFunction& f,
                              int nodes_per_axis, std::shared_ptr<const SphereRule> sphere,
                              const LineRule& rule, double tol) {
    if (!(tol > 0.0)) fail(ErrorCode::NumericFailure, "Neumann tolerance must be > 0");
    const double C = contraction_constant(coeffs);
    if (!(C < 1.0))
        fail(ErrorCode::SubcriticalityViolation, "contraction bound is not below 1; refusing");

    RadianceGrid term(coeffs.domain(), nodes_per_axis, sphere);
    const int nd = term.num_dirs();
    for (int node = 0; node < term.num_nodes(); ++node) {
        if (!term.node_active(node)) continue;
        double* o = term.dir_slice(node);
        const Vec3 x = term.node_eval_pos(node);
        for (int j = 0; j < nd; ++j)
            o[j] = ballistic_value(coeffs.domain(), coeffs.sigma_field(), f, x,
                                   term.sphere().dirs[j], rule);
    }

    SolveResult result{term, RadianceGrid(coeffs.domain(), nodes_per_axis, sphere), {}};
    result.stats.contraction = C;
    result.stats.tolerance = tol;
    result.stats.term_norms.push_back(term.sup_norm());

    RadianceGrid scratch(coeffs.domain(), nodes_per_axis, sphere);
    const double stop = tol * (1.0 - C);
    constexpr int max_iterations = 1000;
    int m = 0;
    while (result.stats.term_norms.back() > stop && m < max_iterations) {
        grid_apply_K(coeffs, term, scratch);
        grid_apply_Tinv(coeffs, scratch, rule, term);
        const double* t = term.dir_slice(0);
        double* u = result.u.dir_slice(0);
        const size_t total = static_cast<size_t>(term.num_nodes()) * nd;
        for (size_t i = 0; i < total; ++i) u[i] += t[i];
        result.stats.term_norms.push_back(term.sup_norm());
        ++m;
    }
    if (m >= max_iterations)
        fail(ErrorCode::NumericFailure, "Neumann iteration failed to reach tolerance");
    result.stats.iterations = m;
    grid_apply_K(coeffs, result.u, result.source);
    return result;
}

double evaluate_solution(const SolveResult& sol, const CoefficientSet& coeffs,
                         const BoundaryFunction& f, const LineRule& rule, const Vec3& x,
                         int dir_index) {
    const Vec3 d = sol.u.sphere().dirs[dir_index];
    return ballistic_value(coeffs.domain(), coeffs.sigma_field(), f, x, d, rule) +
           chord_integral(coeffs.domain(), coeffs.sigma_field(), sol.source, dir_index, x, d,
                          rule);
}

double rte_residual(const SolveResult& sol, const CoefficientSet& coeffs,
                    const BoundaryFunction& f, const LineRule& rule, const Vec3& x, int dir_index,
                    double fd_step) {
    return rte_residuals_at(sol, coeffs, f, rule, x, {dir_index}, fd_step)[0];
}

std::vector<double> rte_residuals_at(const SolveResult& sol, const CoefficientSet& coeffs,
                                     const BoundaryFunction& f, const LineRule& rule,
                                     const Vec3& x, const std::vector<int>& dir_indices,
                                     double fd_step) {
    const SphereRule& sphere = sol.u.sphere();
    const int nd = sphere.size();
    std::vector<double> here(nd);
    for (int l = 0; l < nd; ++l) here[l] = evaluate_solution(sol, coeffs, f, rule, x, l);
    const AngularPhase& kappa = coeffs.kernel().angular;
    const double s_here = coeffs.kernel().spatial(x) * sphere.weight;
    const double sigma_here = coeffs.sigma(x);
    std::vector<double> out;
    out.reserve(dir_indices.size());
    for (int j : dir_indices) {
        const Vec3 d = sphere.dirs[j];
        const double upwind = evaluate_solution(sol, coeffs, f, rule, x - d * fd_step, j);
        const double deriv = (here[j] - upwind) / fd_step;
        double scatter = 0.0;
        for (int l = 0; l < nd; ++l) scatter += kappa(dot(d, sphere.dirs[l])) * here[l];
        out.push_back(std::abs(deriv + sigma_here * here[j] - scatter * s_here));
    }
    return out;
}

}  // namespace bray
