#include "bray/bray.h"

#include <optional>
#include <string>

#include "bray/config.hpp"
#include "bray/errors.hpp"
#include "bray/experiments.hpp"
#include "bray/multifreq.hpp"
#include "bray/recon.hpp"
#include "bray/transport.hpp"

namespace {

thread_local std::string g_last_error;

bray_status status_for(const bray::Error& e) {
    switch (bray::exit_code_for(e.code())) {
        case 2: return BRAY_ERR_CONFIG;
        case 3: return BRAY_ERR_NUMERIC;
        case 4: return BRAY_ERR_IO;
        default: return BRAY_ERR;
    }
}

template <typename Fn>
bray_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return BRAY_OK;
    } catch (const bray::Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BRAY_ERR;
    }
}

bray::Vec3 to_vec(const double v[3]) { return {v[0], v[1], v[2]}; }

bray_status phantom_from_table(const bray::ConfigTable& table, bray_phantom** out);

}  // namespace

struct bray_phantom {
    bray::ExperimentConfig cfg;
    std::optional<bray::CoefficientSet> coeffs;
    std::optional<bray::MultiFreqCoefficients> mf;
};

struct bray_run {
    bray::ConfigTable table;
    std::string report;
    bool has_report = false;
};

namespace {

bray_status phantom_from_table(const bray::ConfigTable& table, bray_phantom** out) {
    return guarded([&] {
        auto p = std::make_unique<bray_phantom>();
        p->cfg = bray::build_experiment(table);
        p->coeffs.emplace(p->cfg.domain, p->cfg.sigma, p->cfg.kernel);
        if (p->cfg.has_multifreq())
            p->mf.emplace(p->cfg.domain, *p->cfg.sigma_e, *p->cfg.sigma_f, p->cfg.kernel);
        *out = p.release();
    });
}

}  // namespace

extern "C" {

const char* bray_version(void) { return bray::kVersion; }

const char* bray_last_error(void) { return g_last_error.c_str(); }

bray_status bray_phantom_open(const char* config_path, bray_phantom** out) {
    if (!config_path || !out) return BRAY_ERR;
    bray::ConfigTable table;
    const bray_status st = guarded([&] { table = bray::ConfigTable::parse_file(config_path); });
    if (st != BRAY_OK) return st;
    return phantom_from_table(table, out);
}

bray_status bray_phantom_parse(const char* config_text, bray_phantom** out) {
    if (!config_text || !out) return BRAY_ERR;
    bray::ConfigTable table;
    const bray_status st =
        guarded([&] { table = bray::ConfigTable::parse_text(config_text); });
    if (st != BRAY_OK) return st;
    return phantom_from_table(table, out);
}

void bray_phantom_close(bray_phantom* p) { delete p; }

bray_status bray_sigma(const bray_phantom* p, const double x[3], double* value) {
    if (!p || !x || !value) return BRAY_ERR;
    return guarded([&] { *value = p->coeffs->sigma(to_vec(x)); });
}

bray_status bray_kernel(const bray_phantom* p, const double x[3], const double theta[3],
                        const double theta_prime[3], double* value) {
    if (!p || !x || !theta || !theta_prime || !value) return BRAY_ERR;
    return guarded([&] {
        const bray::Direction t1(to_vec(theta)), t2(to_vec(theta_prime));
        *value = p->coeffs->k(to_vec(x), t1.vec(), t2.vec());
    });
}

bray_status bray_attenuation(const bray_phantom* p, const double x[3], const double y[3],
                             double* value) {
    if (!p || !x || !y || !value) return BRAY_ERR;
    return guarded([&] {
        *value = bray::attenuation(p->cfg.domain, p->cfg.sigma, to_vec(x), to_vec(y),
                                   p->cfg.line_rule());
    });
}

bray_status bray_contraction(const bray_phantom* p, double* value) {
    if (!p || !value) return BRAY_ERR;
    return guarded([&] { *value = bray::contraction_constant(*p->coeffs); });
}

bray_status bray_subcritical_ratio(const bray_phantom* p, double* max_ratio) {
    if (!p || !max_ratio) return BRAY_ERR;
    return guarded([&] {
        const auto report = bray::check_subcriticality(
            p->cfg.domain, p->cfg.sigma, p->cfg.kernel,
            bray::default_subcriticality_samples(p->cfg.domain));
        *max_ratio = report.max_ratio;
    });
}

bray_status bray_scatter_quad(const bray_phantom* p, const double x[3], const double zeta[3],
                              const double eta[3], double out[4]) {
    if (!p || !x || !zeta || !eta || !out) return BRAY_ERR;
    return guarded([&] {
        const bray::Direction dz(to_vec(zeta)), de(to_vec(eta));
        const auto rays = bray::construct_rays(p->cfg.domain, to_vec(x), dz, de);
        const auto quad = bray::analytic_single_scatter(*p->coeffs, rays, p->cfg.line_rule());
        out[0] = quad.U_ad;
        out[1] = quad.U_bc;
        out[2] = quad.u_ac;
        out[3] = quad.u_bd;
    });
}

bray_status bray_mf_tuple(const bray_phantom* p, const double x[3], const double zeta[3],
                          const double eta[3], double out[8]) {
    if (!p || !x || !zeta || !eta || !out) return BRAY_ERR;
    return guarded([&] {
        if (!p->mf)
            bray::fail(bray::ErrorCode::ConfigError,
                       "phantom has no sigma_e / sigma_f sections");
        const bray::Direction dz(to_vec(zeta)), de(to_vec(eta));
        const auto rays = bray::construct_rays(p->cfg.domain, to_vec(x), dz, de);
        const auto tuple = bray::analytic_mf_measurements(*p->mf, rays, p->cfg.line_rule());
        for (int i = 0; i < 8; ++i) out[i] = tuple[i];
    });
}

bray_status bray_k2_from_quad(const double quad[4], double denom_floor, double* k2) {
    if (!quad || !k2) return BRAY_ERR;
    return guarded([&] {
        bray::MeasurementQuad m;
        m.U_ad = quad[0];
        m.U_bc = quad[1];
        m.u_ac = quad[2];
        m.u_bd = quad[3];
        *k2 = bray::reconstruct_k2(m, denom_floor);
    });
}

bray_status bray_k4_from_tuple(const double tuple[8], double denom_floor, double* k4) {
    if (!tuple || !k4) return BRAY_ERR;
    return guarded([&] {
        bray::MfTuple t;
        for (int i = 0; i < 8; ++i) t[i] = tuple[i];
        *k4 = bray::reconstruct_k4(t, denom_floor);
    });
}

bray_status bray_run_open(const char* config_path, bray_run** out) {
    if (!config_path || !out) return BRAY_ERR;
    return guarded([&] {
        auto r = std::make_unique<bray_run>();
        r->table = bray::ConfigTable::parse_file(config_path);
        *out = r.release();
    });
}

bray_status bray_run_parse(const char* config_text, bray_run** out) {
    if (!config_text || !out) return BRAY_ERR;
    return guarded([&] {
        auto r = std::make_unique<bray_run>();
        r->table = bray::ConfigTable::parse_text(config_text);
        *out = r.release();
    });
}

bray_status bray_run_override(bray_run* r, const char* dotted_key, const char* value) {
    if (!r || !dotted_key || !value) return BRAY_ERR;
    return guarded([&] { r->table.set(dotted_key, value); });
}

bray_status bray_run_execute(bray_run* r, const char* subcommand) {
    if (!r || !subcommand) return BRAY_ERR;
    return guarded([&] {
        const bray::ExperimentConfig cfg = bray::build_experiment(r->table);
        const auto report = bray::run_subcommand(cfg, subcommand);
        r->report = report.dump(2);
        r->has_report = true;
    });
}

const char* bray_run_report(const bray_run* r) {
    return r && r->has_report ? r->report.c_str() : nullptr;
}

void bray_run_close(bray_run* r) { delete r; }

}  // extern "C"
