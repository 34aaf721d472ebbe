/* C interface to the bray broken-ray tomography core.
 *
 * All functions return bray_status; 0 is success. On failure a thread-local
 * message is available from bray_last_error(). Handles are opaque and must be
 * released with their _close function.
 */
#ifndef BRAY_H
#define BRAY_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bray_status {
    BRAY_OK = 0,
    BRAY_ERR = 1,      /* unexpected failure */
    BRAY_ERR_CONFIG = 2,
    BRAY_ERR_NUMERIC = 3,
    BRAY_ERR_IO = 4
} bray_status;

const char* bray_version(void);
const char* bray_last_error(void);

/* Phantom: domain + coefficients parsed from a config file or string. */
typedef struct bray_phantom bray_phantom;
bray_status bray_phantom_open(const char* config_path, bray_phantom** out);
bray_status bray_phantom_parse(const char* config_text, bray_phantom** out);
void bray_phantom_close(bray_phantom* p);

/* Coefficient evaluation. Directions need not be normalized on input. */
bray_status bray_sigma(const bray_phantom* p, const double x[3], double* value);
bray_status bray_kernel(const bray_phantom* p, const double x[3], const double theta[3],
                        const double theta_prime[3], double* value);
bray_status bray_attenuation(const bray_phantom* p, const double x[3], const double y[3],
                             double* value);
bray_status bray_contraction(const bray_phantom* p, double* value);
bray_status bray_subcritical_ratio(const bray_phantom* p, double* max_ratio);

/* The four boundary limits feeding the pointwise formula at crossing point x:
 * out[0] = U_ad, out[1] = U_bc (single-scatter), out[2] = u_ac,
 * out[3] = u_bd (ballistic). */
bray_status bray_scatter_quad(const bray_phantom* p, const double x[3], const double zeta[3],
                              const double eta[3], double out[4]);

/* The eight two-frequency limits: v1 v2 v3 v4 u5 u6 v7 v8. Requires a phantom
 * with sigma_e / sigma_f sections. */
bray_status bray_mf_tuple(const bray_phantom* p, const double x[3], const double zeta[3],
                          const double eta[3], double out[8]);

/* Pure algebra on measured values; no handle needed. */
bray_status bray_k2_from_quad(const double quad[4], double denom_floor, double* k2);
bray_status bray_k4_from_tuple(const double tuple[8], double denom_floor, double* k4);

/* Experiment runner: loads a config, takes overrides, executes a subcommand
 * (simulate | reconstruct | reconstruct-mf | convergence | stability |
 * baseline) and writes its artifacts. */
typedef struct bray_run bray_run;
bray_status bray_run_open(const char* config_path, bray_run** out);
bray_status bray_run_parse(const char* config_text, bray_run** out);
bray_status bray_run_override(bray_run* r, const char* dotted_key, const char* value);
bray_status bray_run_execute(bray_run* r, const char* subcommand);
/* JSON report of the last successful execute; NULL before that. The pointer
 * stays valid until the next execute or close. */
const char* bray_run_report(const bray_run* r);
void bray_run_close(bray_run* r);

#ifdef __cplusplus
}
#endif

#endif /* BRAY_H */
