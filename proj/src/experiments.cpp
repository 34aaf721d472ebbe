#include "bray/experiments.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bray/beam.hpp"
#include "bray/errors.hpp"
#include "bray/multifreq.hpp"
#include "bray/recon.hpp"
#include "bray/report.hpp"
#include "bray/transport.hpp"

namespace bray {

namespace {

using nlohmann::ordered_json;

std::string hex_hash(const std::string& text) {
    std::ostringstream os;
    os << std::hex << fnv1a_hash(text);
    return os.str();
}

double draw_symmetric(std::mt19937_64& eng, double delta) {
    const double u = (eng() >> 11) * 0x1.0p-53;
    return delta * (2.0 * u - 1.0);
}

ordered_json report_skeleton(const ExperimentConfig& cfg, const std::string& subcommand) {
    ordered_json j;
    j["tool"] = "bray";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["config_fnv1a"] = hex_hash(cfg.config_text);
    j["number_format"] = "shortest-roundtrip-decimal";
    if (cfg.seed) j["seed"] = *cfg.seed;
    return j;
}

BeamQuadrature beam_quadrature(const ExperimentConfig& cfg) {
    QuadratureSpec q;
    q.line = cfg.line_rule();
    q.sphere = fibonacci_sphere(8);  // beam integrals use caps, not this rule
    return cfg.beam_coarse ? BeamQuadrature::coarse(q) : BeamQuadrature::fine(q);
}

std::string status_name(PointStatus s) {
    switch (s) {
        case PointStatus::Ok: return "ok";
        case PointStatus::DegenerateGeometry: return "degenerate-geometry";
        case PointStatus::Underflow: return "underflow";
    }
    return "?";
}

struct QuadGeometry {
    RayConstruction rays;
    bool valid = false;
};

QuadGeometry try_rays(const ExperimentConfig& cfg, const Vec3& x) {
    QuadGeometry g{RayConstruction{x, cfg.zeta, cfg.eta, {}, {}, {}, {}}, false};
    if (!cfg.domain.is_interior(x)) return g;
    try {
        g.rays = construct_rays(cfg.domain, x, cfg.zeta, cfg.eta);
    } catch (const Error&) {
        return g;
    }
    const double min_chord = cfg.min_chord_fraction * cfg.domain.radius();
    if (g.rays.chord_zeta() < min_chord || g.rays.chord_eta() < min_chord) return g;
    g.valid = true;
    return g;
}

void write_scan_slices(const ExperimentConfig& cfg, const ReconstructionGrid& grid,
                       const std::string& prefix, ordered_json& report) {
    const int n = cfg.scan_n;
    if (n < 2 || grid.points.size() != static_cast<size_t>(n) * n * n) return;
    const int kmid = n / 2;
    std::vector<double> est(static_cast<size_t>(n) * n), truth(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const auto& p = grid.points[(static_cast<size_t>(i) * n + j) * n + kmid];
            est[static_cast<size_t>(j) * n + i] = p.status == PointStatus::Ok ? p.estimate : 0.0;
            truth[static_cast<size_t>(j) * n + i] = p.truth;
        }
    const auto [elo, ehi] = write_pgm(cfg.output_dir + "/" + prefix + "_slice.pgm", est, n, n);
    report["slice"] = {{"file", prefix + "_slice.pgm"},
                       {"plane", "z-mid"},
                       {"scale_min", elo},
                       {"scale_max", ehi}};
    if (grid.has_truth) {
        const auto [tlo, thi] =
            write_pgm(cfg.output_dir + "/" + prefix + "_truth_slice.pgm", truth, n, n);
        report["truth_slice"] = {{"file", prefix + "_truth_slice.pgm"},
                                 {"scale_min", tlo},
                                 {"scale_max", thi}};
    }
}

void write_points_csv(const ExperimentConfig& cfg, const ReconstructionGrid& grid,
                      const std::string& name, const std::string& estimate_column) {
    CsvWriter csv("point_index,x,y,z,status," + estimate_column + ",truth,rel_error");
    csv.add_comment("number-format: shortest-roundtrip-decimal");
    for (size_t i = 0; i < grid.points.size(); ++i) {
        const auto& p = grid.points[i];
        csv.add_row({std::to_string(i), format_double(p.x.x), format_double(p.x.y),
                     format_double(p.x.z), status_name(p.status), format_double(p.estimate),
                     format_double(p.truth), format_double(p.rel_error)});
    }
    write_text_file(cfg.output_dir + "/" + name, csv.str());
}

ordered_json grid_summary(const ExperimentConfig& cfg, const ReconstructionGrid& grid) {
    const int ok = grid.count(PointStatus::Ok);
    const int degenerate = grid.count(PointStatus::DegenerateGeometry);
    const int underflow = grid.count(PointStatus::Underflow);
    const double bad_fraction =
        grid.points.empty() ? 0.0
                            : static_cast<double>(degenerate + underflow) / grid.points.size();
    ordered_json j;
    j["points"] = grid.points.size();
    j["ok"] = ok;
    j["degenerate"] = degenerate;
    j["underflow"] = underflow;
    j["bad_fraction"] = bad_fraction;
    if (grid.has_truth) {
        j["max_rel_error"] = grid.max_rel_error();
        j["max_abs_error"] = grid.max_abs_error();
    }
    if (bad_fraction > cfg.max_bad_fraction)
        fail(ErrorCode::NumericFailure,
             "degenerate/underflow fraction " + format_double(bad_fraction) +
                 " exceeds the configured limit");
    return j;
}

// ---- simulate ----------------------------------------------------------

struct MeasurementRow {
    Vec3 source, source_dir, det, det_dir;
    CollisionBreakdown values;
    double epsilon;
    std::string provenance;
};

void append_row(CsvWriter& csv, const MeasurementRow& r) {
    csv.add_row({format_double(r.source.x), format_double(r.source.y), format_double(r.source.z),
                 format_double(r.source_dir.x), format_double(r.source_dir.y),
                 format_double(r.source_dir.z), format_double(r.det.x), format_double(r.det.y),
                 format_double(r.det.z), format_double(r.det_dir.x), format_double(r.det_dir.y),
                 format_double(r.det_dir.z), format_double(r.values.ballistic),
                 format_double(r.values.single_scatter), format_double(r.values.tail_bound),
                 format_double(r.epsilon), r.provenance});
}

ordered_json run_simulate(const ExperimentConfig& cfg) {
    const CoefficientSet coeffs = cfg.coefficients();
    const BeamQuadrature bq = beam_quadrature(cfg);
    const auto points = scan_lattice(cfg.domain.center(), cfg.scan_extent, cfg.scan_n);

    CsvWriter csv(kMeasurementHeader);
    int skipped = 0, rows = 0;
    for (const Vec3& x : points) {
        const QuadGeometry g = try_rays(cfg, x);
        if (!g.valid) {
            ++skipped;
            continue;
        }
        const auto& rays = g.rays;
        auto inflow = [&](const Vec3& p, const Direction& d) {
            return BoundaryPoint::classify(cfg.domain, p, d);
        };
        const BoundaryPoint det_c = BoundaryPoint::classify(cfg.domain, rays.c, cfg.zeta);
        const BoundaryPoint det_d = BoundaryPoint::classify(cfg.domain, rays.d, cfg.eta);
        const BeamSpec a_unit{inflow(rays.a, cfg.zeta), cfg.epsilon, BeamClass::Unit, cfg.gain};
        const BeamSpec a_delta{a_unit.base, cfg.epsilon, BeamClass::DeltaNormalized, cfg.gain};
        const BeamSpec b_unit{inflow(rays.b, cfg.eta), cfg.epsilon, BeamClass::Unit, cfg.gain};
        const BeamSpec b_delta{b_unit.base, cfg.epsilon, BeamClass::DeltaNormalized, cfg.gain};

        // fixed order per point: a->c (unit), a->d (delta), b->d (unit), b->c (delta)
        const struct {
            const BeamSpec& beam;
            const BoundaryPoint& det;
        } combos[4] = {{a_unit, det_c}, {a_delta, det_d}, {b_unit, det_d}, {b_delta, det_c}};
        for (const auto& combo : combos) {
            MeasurementRow r{combo.beam.base.position, combo.beam.base.direction.vec(),
                             combo.det.position, combo.det.direction.vec(),
                             measure_collision_terms(coeffs, combo.beam, combo.det, bq),
                             cfg.epsilon, "finite-epsilon"};
            append_row(csv, r);
            ++rows;
        }
    }
    write_text_file(cfg.output_dir + "/measurements.csv", csv.str());

    ordered_json j = report_skeleton(cfg, "simulate");
    j["points"] = points.size();
    j["skipped_points"] = skipped;
    j["rows"] = rows;
    j["epsilon"] = cfg.epsilon;
    j["gain"] = cfg.gain;
    j["files"] = {"measurements.csv"};
    return j;
}

// ---- reconstruct -------------------------------------------------------

// Crossing point of the two beam axes; the rows carry enough geometry to
// recover it without the config lattice.
Vec3 crossing_from_lines(const Vec3& a, const Vec3& u, const Vec3& b, const Vec3& v,
                         double scale) {
    const double c = dot(u, v);
    const double denom = 1.0 - c * c;
    if (denom < 1e-12)
        fail(ErrorCode::DegenerateGeometry, "measurement rows describe parallel beams");
    const Vec3 w = a - b;
    const double wu = dot(w, u), wv = dot(w, v);
    const double s = (c * wv - wu) / denom;
    const double t = (wv - c * wu) / denom;
    const Vec3 p1 = a + u * s, p2 = b + v * t;
    if (norm(p1 - p2) > 1e-6 * scale)
        fail(ErrorCode::InvalidMeasurement, "beam axes in measurement file do not intersect");
    return (p1 + p2) * 0.5;
}

ReconstructionGrid reconstruct_from_file(const ExperimentConfig& cfg) {
    if (cfg.measurements_path.empty())
        fail(ErrorCode::ConfigError, "run.source = file requires run.measurements = <path>");
    const CsvFile f = read_csv(cfg.measurements_path);
    if (f.columns.size() != 17)
        fail(ErrorCode::IoError, "unexpected measurement column count in " +
                                     cfg.measurements_path);
    if (f.rows.size() % 4 != 0)
        fail(ErrorCode::IoError, "measurement rows must come in groups of four per point");

    const CoefficientSet coeffs = cfg.coefficients();
    const TruthFn truth = [&](const Vec3& x) {
        const double k = coeffs.k(x, cfg.zeta.vec(), cfg.eta.vec());
        return k * k;
    };
    ReconstructionGrid grid{cfg.zeta, cfg.eta, {}, true};
    auto num = [&](size_t row, int col) { return parse_double_exact(f.rows[row][col]); };
    auto vec = [&](size_t row, int col) {
        return Vec3{num(row, col), num(row, col + 1), num(row, col + 2)};
    };
    for (size_t gidx = 0; gidx < f.rows.size() / 4; ++gidx) {
        const size_t r0 = 4 * gidx;
        ReconPoint pt;
        try {
            const Vec3 a = vec(r0, 0), dir_a = vec(r0, 3);
            const Vec3 b = vec(r0 + 2, 0), dir_b = vec(r0 + 2, 3);
            pt.x = crossing_from_lines(a, dir_a, b, dir_b, cfg.domain.radius());
            MeasurementQuad m;
            m.u_ac = num(r0, 12) + num(r0, 13);
            m.U_ad = num(r0 + 1, 13);
            m.u_bd = num(r0 + 2, 12) + num(r0 + 2, 13);
            m.U_bc = num(r0 + 3, 13);
            m.provenance = Provenance::FiniteEpsilon;
            m.epsilon = num(r0, 15);
            pt.truth = truth(pt.x);
            pt.estimate = reconstruct_k2(m, cfg.denom_floor);
            pt.rel_error = std::abs(pt.estimate - pt.truth) / std::max(std::abs(pt.truth), 1e-300);
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::DegenerateGeometry: pt.status = PointStatus::DegenerateGeometry; break;
                case ErrorCode::Underflow: pt.status = PointStatus::Underflow; break;
                default: throw;
            }
        }
        grid.points.push_back(pt);
    }
    return grid;
}

ordered_json run_reconstruct(const ExperimentConfig& cfg) {
    ReconstructionGrid grid{cfg.zeta, cfg.eta, {}, false};
    if (cfg.source == MeasurementSource::File) {
        grid = reconstruct_from_file(cfg);
    } else {
        const CoefficientSet coeffs = cfg.coefficients();
        const BeamQuadrature bq = beam_quadrature(cfg);
        const LineRule rule = cfg.line_rule();
        const QuadSource source = [&](const RayConstruction& rays) {
            if (cfg.source == MeasurementSource::Oracle)
                return analytic_single_scatter(coeffs, rays, rule);
            return simulate_quad(coeffs, rays, cfg.epsilon, cfg.gain, bq);
        };
        const TruthFn truth = [&](const Vec3& x) {
            const double k = coeffs.k(x, cfg.zeta.vec(), cfg.eta.vec());
            return k * k;
        };
        ReconOptions opts;
        opts.denom_floor = cfg.denom_floor;
        opts.min_chord_fraction = cfg.min_chord_fraction;
        grid = reconstruct_field(cfg.domain, scan_lattice(cfg.domain.center(), cfg.scan_extent,
                                                          cfg.scan_n),
                                 cfg.zeta, cfg.eta, source, truth, opts);
    }

    write_points_csv(cfg, grid, "points.csv", "k2_estimate");
    ordered_json j = report_skeleton(cfg, "reconstruct");
    j["source"] = cfg.source == MeasurementSource::Oracle     ? "oracle"
                  : cfg.source == MeasurementSource::Simulate ? "simulate"
                                                              : "file";
    j["summary"] = grid_summary(cfg, grid);
    write_scan_slices(cfg, grid, "k2", j);
    j["files"] = {"points.csv"};
    return j;
}

ordered_json run_reconstruct_mf(const ExperimentConfig& cfg) {
    if (!cfg.has_multifreq())
        fail(ErrorCode::ConfigError,
             "reconstruct-mf needs [phantom.sigma_e] and [phantom.sigma_f]");
    if (cfg.source == MeasurementSource::File)
        fail(ErrorCode::ConfigError, "reconstruct-mf supports oracle and simulate sources only");
    const MultiFreqCoefficients mf(cfg.domain, *cfg.sigma_e, *cfg.sigma_f, cfg.kernel);
    const BeamQuadrature bq = beam_quadrature(cfg);
    const LineRule rule = cfg.line_rule();

    ReconstructionGrid grid{cfg.zeta, cfg.eta, {}, true};
    for (const Vec3& x : scan_lattice(cfg.domain.center(), cfg.scan_extent, cfg.scan_n)) {
        ReconPoint pt;
        pt.x = x;
        const QuadGeometry g = try_rays(cfg, x);
        if (!g.valid) {
            pt.status = PointStatus::DegenerateGeometry;
            grid.points.push_back(pt);
            continue;
        }
        const double k = mf.kernel()(x, cfg.zeta.vec(), cfg.eta.vec());
        pt.truth = k * k * k * k;
        try {
            const MfTuple tuple = cfg.source == MeasurementSource::Oracle
                                      ? analytic_mf_measurements(mf, g.rays, rule)
                                      : simulate_mf_tuple(mf, g.rays, cfg.epsilon, cfg.gain, bq);
            pt.estimate = reconstruct_k4(tuple, cfg.denom_floor);
            pt.rel_error = std::abs(pt.estimate - pt.truth) / std::max(std::abs(pt.truth), 1e-300);
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::Underflow: pt.status = PointStatus::Underflow; break;
                case ErrorCode::DegenerateGeometry: pt.status = PointStatus::DegenerateGeometry; break;
                default: throw;
            }
        }
        grid.points.push_back(pt);
    }

    write_points_csv(cfg, grid, "points_mf.csv", "k4_estimate");
    ordered_json j = report_skeleton(cfg, "reconstruct-mf");
    j["summary"] = grid_summary(cfg, grid);
    write_scan_slices(cfg, grid, "k4", j);
    j["files"] = {"points_mf.csv"};
    return j;
}

// ---- convergence -------------------------------------------------------

ordered_json run_convergence(const ExperimentConfig& cfg) {
    const auto& eps = cfg.convergence_epsilons;
    if (eps.size() < 3)
        fail(ErrorCode::ConfigError, "convergence needs at least three epsilon values");
    for (size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1]))
            fail(ErrorCode::ConfigError, "convergence epsilon list must be strictly decreasing");

    const CoefficientSet coeffs = cfg.coefficients();
    const BeamQuadrature bq = beam_quadrature(cfg);
    const LineRule rule = cfg.line_rule();
    const RayConstruction rays = construct_rays(cfg.domain, cfg.domain.center(), cfg.zeta, cfg.eta);
    const MeasurementQuad limits = analytic_single_scatter(coeffs, rays, rule);
    const BoundaryPoint det_c = BoundaryPoint::classify(cfg.domain, rays.c, cfg.zeta);
    const BoundaryPoint det_d = BoundaryPoint::classify(cfg.domain, rays.d, cfg.eta);
    const BoundaryPoint src_a = BoundaryPoint::classify(cfg.domain, rays.a, cfg.zeta);

    std::vector<double> ball_err, single_err, tails;
    CsvWriter csv("epsilon,ballistic_error,single_scatter_error,multi_collision_tail_estimate");
    csv.add_comment("number-format: shortest-roundtrip-decimal");
    for (double e : eps) {
        const BeamSpec unit{src_a, e, BeamClass::Unit, cfg.gain};
        const BeamSpec delta{src_a, e, BeamClass::DeltaNormalized, cfg.gain};
        const auto bal = measure_collision_terms(coeffs, unit, det_c, bq);
        const auto sin = measure_collision_terms(coeffs, delta, det_d, bq);
        const double be =
            std::abs(bal.ballistic + bal.single_scatter - cfg.gain * limits.u_ac);
        const double se = std::abs(sin.single_scatter - cfg.gain * limits.U_ad);
        const double tail = multi_collision_tail_estimate(coeffs, delta);
        ball_err.push_back(be);
        single_err.push_back(se);
        tails.push_back(tail);
        csv.add_row({format_double(e), format_double(be), format_double(se),
                     format_double(tail)});
    }
    write_text_file(cfg.output_dir + "/convergence.csv", csv.str());

    auto decreasing = [](const std::vector<double>& v) {
        for (size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return true;
    };
    ordered_json j = report_skeleton(cfg, "convergence");
    j["epsilons"] = eps;
    j["ballistic_error"] = ball_err;
    j["single_scatter_error"] = single_err;
    j["multi_collision_tail_estimate"] = tails;
    j["ballistic_strictly_decreasing"] = decreasing(ball_err);
    j["single_scatter_strictly_decreasing"] = decreasing(single_err);
    j["ballistic_slope"] = loglog_slope(eps, ball_err);
    j["single_scatter_slope"] = loglog_slope(eps, single_err);
    j["tail_estimate_slope"] = loglog_slope(eps, tails);
    j["files"] = {"convergence.csv"};
    return j;
}

// ---- stability ---------------------------------------------------------

std::vector<Chord> baseline_chords(const ExperimentConfig& cfg) {
    std::vector<Chord> chords;
    const int n = cfg.art_chords_per_side;
    const double R = cfg.domain.radius();
    const Vec3 c0 = cfg.domain.center();
    const double ext = cfg.art_lateral_extent * R;
    for (int axis = 0; axis < 3; ++axis)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double u = n == 1 ? 0.0 : -ext + 2.0 * ext * i / (n - 1);
                const double v = n == 1 ? 0.0 : -ext + 2.0 * ext * j / (n - 1);
                if (u * u + v * v > 0.95 * R * R) continue;
                const double w = std::sqrt(R * R - u * u - v * v);
                Vec3 lo, hi;
                if (axis == 0) lo = {-w, u, v}, hi = {w, u, v};
                if (axis == 1) lo = {u, -w, v}, hi = {u, w, v};
                if (axis == 2) lo = {u, v, -w}, hi = {u, v, w};
                chords.push_back({c0 + lo, c0 + hi});
            }
    return chords;
}

double sigma_grid_error(const SigmaGrid& g, const ExperimentConfig& cfg) {
    double acc = 0.0;
    int count = 0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                const Vec3 c = g.lo + Vec3{(ix + 0.5) * g.cell, (iy + 0.5) * g.cell,
                                           (iz + 0.5) * g.cell};
                if (norm(c - cfg.domain.center()) > 0.6 * cfg.domain.radius()) continue;
                acc += std::abs(g.values[(static_cast<size_t>(ix) * g.n + iy) * g.n + iz] -
                                cfg.sigma(c));
                ++count;
            }
    return count > 0 ? acc / count : 0.0;
}

ordered_json run_stability(const ExperimentConfig& cfg) {
    if (!cfg.seed)
        fail(ErrorCode::ConfigError, "stability runs are stochastic; a seed is required");
    if (cfg.stability_deltas.empty())
        fail(ErrorCode::ConfigError, "stability needs a delta list");
    for (double d : cfg.stability_deltas)
        if (!(d >= 0.0)) fail(ErrorCode::ConfigError, "stability deltas must be nonnegative");

    const CoefficientSet coeffs = cfg.coefficients();
    const LineRule rule = cfg.line_rule();
    const double G = cfg.stability_gain;
    const auto points = scan_lattice(cfg.domain.center(), cfg.scan_extent, cfg.scan_n);

    struct OraclePoint {
        MeasurementQuad quad;  // gain-scaled
        double truth_k2;
        MfTuple tuple;  // gain-scaled, multifreq only
        double truth_k4;
    };
    std::vector<OraclePoint> oracle;
    std::optional<MultiFreqCoefficients> mf;
    if (cfg.has_multifreq())
        mf.emplace(cfg.domain, *cfg.sigma_e, *cfg.sigma_f, cfg.kernel);
    for (const Vec3& x : points) {
        const QuadGeometry g = try_rays(cfg, x);
        if (!g.valid) continue;
        OraclePoint op;
        op.quad = analytic_single_scatter(coeffs, g.rays, rule);
        op.quad.U_ad *= G;
        op.quad.U_bc *= G;
        op.quad.u_ac *= G;
        op.quad.u_bd *= G;
        const double k = coeffs.k(x, cfg.zeta.vec(), cfg.eta.vec());
        op.truth_k2 = k * k;
        if (mf) {
            op.tuple = analytic_mf_measurements(*mf, g.rays, rule);
            for (double& v : op.tuple) v *= G;
            const double kf = mf->kernel()(x, cfg.zeta.vec(), cfg.eta.vec());
            op.truth_k4 = kf * kf * kf * kf;
        }
        oracle.push_back(op);
    }
    if (oracle.empty()) fail(ErrorCode::NumericFailure, "no valid scan points for stability");

    std::vector<Chord> chords;
    std::vector<double> clean_readings;
    double baseline_bias = 0.0;
    if (cfg.stability_baseline) {
        chords = baseline_chords(cfg);
        for (const Chord& c : chords)
            clean_readings.push_back(G * attenuation(cfg.domain, cfg.sigma, c.entry, c.exit, rule));
        const auto clean_grid = art_invert_sigma(xray_line_integrals(clean_readings, G), chords,
                                                 cfg.domain, cfg.art_grid, cfg.art);
        baseline_bias = sigma_grid_error(clean_grid, cfg);
    }

    std::mt19937_64 eng(*cfg.seed);
    std::vector<double> sup_k2, sup_k4, chat_k2, baseline_err;
    std::vector<int> excluded_k2, excluded_k4;
    CsvWriter csv(
        "delta,sup_error_k2,c_hat_k2,excluded_k2,sup_error_k4,excluded_k4,baseline_sigma_error");
    csv.add_comment("number-format: shortest-roundtrip-decimal");
    for (double delta : cfg.stability_deltas) {
        double sup2 = 0.0, sup4 = 0.0;
        int excl2 = 0, excl4 = 0;
        for (const OraclePoint& op : oracle) {
            MeasurementQuad m = op.quad;
            m.provenance = Provenance::Noisy;
            m.U_ad = std::max(0.0, m.U_ad + draw_symmetric(eng, delta));
            m.U_bc = std::max(0.0, m.U_bc + draw_symmetric(eng, delta));
            m.u_ac += draw_symmetric(eng, delta);
            m.u_bd += draw_symmetric(eng, delta);
            if (m.u_ac <= cfg.denom_floor || m.u_bd <= cfg.denom_floor) {
                ++excl2;
            } else {
                sup2 = std::max(sup2, std::abs(reconstruct_k2(m, cfg.denom_floor) - op.truth_k2));
            }
            if (mf) {
                MfTuple t = op.tuple;
                for (int q = 0; q < 8; ++q) {
                    t[q] += draw_symmetric(eng, delta);
                    if (q < 4) t[q] = std::max(0.0, t[q]);
                }
                bool ok = true;
                for (int q = 4; q < 8; ++q) ok = ok && t[q] > cfg.denom_floor;
                if (!ok) {
                    ++excl4;
                } else {
                    sup4 = std::max(sup4,
                                    std::abs(reconstruct_k4(t, cfg.denom_floor) - op.truth_k4));
                }
            }
        }
        double berr = 0.0;
        if (cfg.stability_baseline) {
            std::vector<double> noisy = clean_readings;
            for (double& r : noisy)
                r = std::max(cfg.denom_floor, r + draw_symmetric(eng, delta));
            const auto g = art_invert_sigma(xray_line_integrals(noisy, G), chords, cfg.domain,
                                            cfg.art_grid, cfg.art);
            berr = sigma_grid_error(g, cfg);
        }
        sup_k2.push_back(sup2);
        chat_k2.push_back(delta > 0.0 ? sup2 / delta : 0.0);
        excluded_k2.push_back(excl2);
        sup_k4.push_back(sup4);
        excluded_k4.push_back(excl4);
        baseline_err.push_back(berr);
        csv.add_row({format_double(delta), format_double(sup2), format_double(chat_k2.back()),
                     std::to_string(excl2), format_double(sup4), std::to_string(excl4),
                     format_double(berr)});
    }
    write_text_file(cfg.output_dir + "/stability.csv", csv.str());

    // zero-delta rows are exact by construction; the constant is read off the
    // positive deltas only
    auto chat_stats = [&](const std::vector<double>& sup) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (size_t i = 0; i < sup.size(); ++i) {
            if (!(cfg.stability_deltas[i] > 0.0)) continue;
            const double c = sup[i] / cfg.stability_deltas[i];
            lo = any ? std::min(lo, c) : c;
            hi = any ? std::max(hi, c) : c;
            any = true;
        }
        return std::pair<double, double>{hi, any && lo > 0.0 ? hi / lo : 1.0};
    };
    const auto [chat2_max, chat2_ratio] = chat_stats(sup_k2);

    ordered_json j = report_skeleton(cfg, "stability");
    j["deltas"] = cfg.stability_deltas;
    j["gain"] = G;
    j["valid_points"] = oracle.size();
    j["k2"] = {{"sup_error", sup_k2},
               {"c_hat", chat_k2},
               {"c_hat_max", chat2_max},
               {"c_hat_ratio", chat2_ratio},
               {"slope", loglog_slope(cfg.stability_deltas, sup_k2)},
               {"excluded", excluded_k2}};
    if (mf) {
        std::vector<double> chat4;
        for (size_t i = 0; i < sup_k4.size(); ++i)
            chat4.push_back(cfg.stability_deltas[i] > 0.0 ? sup_k4[i] / cfg.stability_deltas[i]
                                                          : 0.0);
        const auto [chat4_max, chat4_ratio] = chat_stats(sup_k4);
        j["k4"] = {{"sup_error", sup_k4},
                   {"c_hat", chat4},
                   {"c_hat_max", chat4_max},
                   {"c_hat_ratio", chat4_ratio},
                   {"slope", loglog_slope(cfg.stability_deltas, sup_k4)},
                   {"excluded", excluded_k4}};
    }
    if (cfg.stability_baseline) {
        j["baseline"] = {{"sigma_error", baseline_err},
                         {"sigma_error_noise_free", baseline_bias},
                         {"chords", chords.size()},
                         {"slope", loglog_slope(cfg.stability_deltas, baseline_err)}};
    }
    j["files"] = {"stability.csv"};
    return j;
}

// ---- baseline ----------------------------------------------------------

ordered_json run_baseline(const ExperimentConfig& cfg) {
    const LineRule rule = cfg.line_rule();
    const auto chords = baseline_chords(cfg);
    std::vector<double> readings;
    for (const Chord& c : chords)
        readings.push_back(cfg.gain *
                           attenuation(cfg.domain, cfg.sigma, c.entry, c.exit, rule));
    int clamped = 0;
    if (cfg.noise_delta > 0.0) {
        if (!cfg.seed)
            fail(ErrorCode::ConfigError, "baseline with noise is stochastic; a seed is required");
        std::mt19937_64 eng(*cfg.seed);
        for (double& r : readings) {
            r += draw_symmetric(eng, cfg.noise_delta);
            if (r < cfg.denom_floor) {
                r = cfg.denom_floor;
                ++clamped;
            }
        }
    }
    const auto integrals = xray_line_integrals(readings, cfg.gain);
    const auto grid = art_invert_sigma(integrals, chords, cfg.domain, cfg.art_grid, cfg.art);

    // mid-plane voxel slice of the estimate
    std::vector<double> slice(static_cast<size_t>(grid.n) * grid.n);
    const int kmid = grid.n / 2;
    for (int j2 = 0; j2 < grid.n; ++j2)
        for (int i = 0; i < grid.n; ++i)
            slice[static_cast<size_t>(j2) * grid.n + i] =
                grid.values[(static_cast<size_t>(i) * grid.n + j2) * grid.n + kmid];
    const auto [lo, hi] = write_pgm(cfg.output_dir + "/sigma_slice.pgm", slice, grid.n, grid.n);

    CsvWriter csv("chord_index,entry_x,entry_y,entry_z,exit_x,exit_y,exit_z,line_integral");
    csv.add_comment("number-format: shortest-roundtrip-decimal");
    for (size_t i = 0; i < chords.size(); ++i)
        csv.add_row({std::to_string(i), format_double(chords[i].entry.x),
                     format_double(chords[i].entry.y), format_double(chords[i].entry.z),
                     format_double(chords[i].exit.x), format_double(chords[i].exit.y),
                     format_double(chords[i].exit.z), format_double(integrals[i])});
    write_text_file(cfg.output_dir + "/line_integrals.csv", csv.str());

    ordered_json j = report_skeleton(cfg, "baseline");
    j["chords"] = chords.size();
    j["noise_delta"] = cfg.noise_delta;
    j["clamped_readings"] = clamped;
    j["underdetermined"] = grid.underdetermined;
    j["sigma_mean_ball"] = grid.mean_over_ball(cfg.domain, 0.6);
    j["sigma_error_mean"] = sigma_grid_error(grid, cfg);
    j["slice"] = {{"file", "sigma_slice.pgm"}, {"scale_min", lo}, {"scale_max", hi}};
    j["files"] = {"line_integrals.csv", "sigma_slice.pgm"};
    return j;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= lx.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

nlohmann::ordered_json run_subcommand(const ExperimentConfig& cfg,
                                      const std::string& subcommand) {
    ensure_directory(cfg.output_dir);
    ordered_json j;
    if (subcommand == "simulate")
        j = run_simulate(cfg);
    else if (subcommand == "reconstruct")
        j = run_reconstruct(cfg);
    else if (subcommand == "reconstruct-mf")
        j = run_reconstruct_mf(cfg);
    else if (subcommand == "convergence")
        j = run_convergence(cfg);
    else if (subcommand == "stability")
        j = run_stability(cfg);
    else if (subcommand == "baseline")
        j = run_baseline(cfg);
    else
        fail(ErrorCode::ConfigError, "unknown subcommand: " + subcommand);
    write_json_file(cfg.output_dir + "/" + subcommand + "_report.json", j);
    return j;
}

}  // namespace bray
