#pragma once

#include <vector>

#include "bray/radiance.hpp"
#include "bray/transport.hpp"

namespace bray {

// Grid-level K: out(node, j) = s(node) * sum_l kappa(d_j . d_l) u(node, l) w.
void grid_apply_K(const CoefficientSet& coeffs, const RadianceGrid& u, RadianceGrid& out);

// Grid-level T^-1: backward attenuated line integral of the trilinearly
// interpolated source, one chord per (node, direction).
void grid_apply_Tinv(const CoefficientSet& coeffs, const RadianceGrid& source,
                     const LineRule& rule, RadianceGrid& out);

struct SolveStats {
    int iterations = 0;
    std::vector<double> term_norms;  // sup norms of the Neumann terms, ballistic first
    double contraction = 0.0;        // a-priori bound used for the stopping rule
    double tolerance = 0.0;
};

struct SolveResult {
    RadianceGrid u;       // accumulated partial sum
    RadianceGrid source;  // K u for the converged field; drives residual checks
    SolveStats stats;
};

// Collision expansion on the grid: u_0 = Jf, u_{m+1} = T^-1 K u_m, summed
// until the current term falls below tol * (1 - C); the geometric tail then
// bounds the truncation error by tol.
SolveResult solve_rte_neumann(const CoefficientSet& coeffs, const BoundaryFunction& f,
                              int nodes_per_axis, std::shared_ptr<const SphereRule> sphere,
                              const LineRule& rule, double tol);

// Semi-analytic evaluation of the solved field at an arbitrary interior point:
// Jf + T^-1 of the converged grid source. Exact transport of the discrete
// source, so it satisfies the transport identity up to quadrature.
double evaluate_solution(const SolveResult& sol, const CoefficientSet& coeffs,
                         const BoundaryFunction& f, const LineRule& rule, const Vec3& x,
                         int dir_index);

// |upwind directional derivative + sigma u - K u| at (x, direction j).
double rte_residual(const SolveResult& sol, const CoefficientSet& coeffs,
                    const BoundaryFunction& f, const LineRule& rule, const Vec3& x, int dir_index,
                    double fd_step);

// Residuals for several directions at one point, sharing the full direction
// sweep the scattering term needs.
std::vector<double> rte_residuals_at(const SolveResult& sol, const CoefficientSet& coeffs,
                                     const BoundaryFunction& f, const LineRule& rule,
                                     const Vec3& x, const std::vector<int>& dir_indices,
                                     double fd_step);

}  // namespace bray
