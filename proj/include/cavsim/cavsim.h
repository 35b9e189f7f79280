/* cavsim: fiber Fabry-Perot microcavity + NV emitter toolkit, C interface.
 *
 * Conventions: wavelengths nm, lengths um, volumes um^3, rates rad/s,
 * transmissions/losses absolute fractions (not ppm). All functions return
 * cavsim_status; on error, outputs are untouched and cavsim_last_error()
 * carries a message (thread-local).
 */
#ifndef CAVSIM_H
#define CAVSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cavsim_status {
    CAVSIM_OK = 0,
    CAVSIM_ERR_INVALID_ARGUMENT = 1,
    CAVSIM_ERR_DOMAIN = 2,          /* valid types, physically impossible values */
    CAVSIM_ERR_NO_CONVERGENCE = 3,  /* iterative solver exhausted; best-so-far returned */
    CAVSIM_ERR_IO = 4,
    CAVSIM_ERR_INTERNAL = 5
} cavsim_status;

const char *cavsim_last_error(void);
const char *cavsim_version(void);

/* ---------- dielectric mirror stacks ---------- */

typedef struct cavsim_stack cavsim_stack;

cavsim_status cavsim_stack_create(double ambient_index, double substrate_index,
                                  cavsim_stack **out);
cavsim_status cavsim_stack_add_layer(cavsim_stack *s, double refractive_index,
                                     double thickness_nm);
/* Quarter-wave Bragg mirror: `pairs` high/low pairs, high-index layer outermost
 * (ambient side); optional extra low-index quarter-wave layer appended on the
 * ambient side. */
cavsim_status cavsim_stack_quarter_wave(double center_wavelength_nm, double n_high,
                                        double n_low, int pairs,
                                        double substrate_index,
                                        int terminate_low_quarter,
                                        cavsim_stack **out);
void cavsim_stack_destroy(cavsim_stack *s);

size_t cavsim_stack_layer_count(const cavsim_stack *s);
cavsim_status cavsim_stack_layer_get(const cavsim_stack *s, size_t i,
                                     double *refractive_index, double *thickness_nm);

typedef struct cavsim_stack_response {
    double reflectance;      /* |r|^2 */
    double transmittance;    /* (n_s/n_a)|t|^2 */
    double phase_rad;        /* arg r, in (-pi, pi] */
} cavsim_stack_response;

cavsim_status cavsim_stack_response_at(const cavsim_stack *s, double wavelength_nm,
                                       cavsim_stack_response *out);
/* Uniform wavelength grid, both output arrays of length `samples`. */
cavsim_status cavsim_stack_transmission_spectrum(const cavsim_stack *s,
                                                 double lambda_min_nm,
                                                 double lambda_max_nm,
                                                 size_t samples,
                                                 double *wavelengths_nm,
                                                 double *transmittance);
/* Equivalent free-space penetration length from the dispersion of the
 * reflection phase. `in_stop_band` (may be NULL) is 0 when local T >= 1e-2,
 * where the result is not meaningful as a penetration. */
cavsim_status cavsim_stack_penetration_depth(const cavsim_stack *s,
                                             double wavelength_nm,
                                             double *depth_um, int *in_stop_band);
/* Squared standing-wave field at height h above the outer surface, relative to
 * an antinode; in [0,1]. */
cavsim_status cavsim_stack_field_factor(const cavsim_stack *s, double wavelength_nm,
                                        double emitter_height_nm, double *eta_e);

/* ---------- plane-concave cavity geometry and loss budget ---------- */

typedef struct cavsim_geometry {
    double d_eff_um;        /* effective (penetration-inclusive) length */
    double roc_um;          /* fiber mirror radius of curvature */
    double wavelength_nm;
} cavsim_geometry;

typedef struct cavsim_budget {
    double t1, l1;          /* fiber mirror transmission / loss, fractions */
    double t2, l2;          /* macroscopic (outcoupling) mirror */
} cavsim_budget;

cavsim_status cavsim_effective_length_um(double lambda1_nm, double lambda2_nm,
                                         double *d_eff_um);
cavsim_status cavsim_transverse_mode_spacing_nm(const cavsim_geometry *g,
                                                double *spacing_nm);
cavsim_status cavsim_roc_from_splitting_um(double spacing_nm, double wavelength_nm,
                                           double d_eff_um, double *roc_um);
cavsim_status cavsim_mode_waist_um(const cavsim_geometry *g, double *w0_um);
cavsim_status cavsim_mode_volume_um3(const cavsim_geometry *g, double *v_um3);
cavsim_status cavsim_finesse(const cavsim_budget *b, double *finesse);
cavsim_status cavsim_linewidth_nm(double lambda0_nm, double d_eff_um,
                                  const cavsim_budget *b, double *linewidth_nm);
cavsim_status cavsim_quality_factor(double lambda0_nm, double linewidth_nm,
                                    double *q);
cavsim_status cavsim_decay_rate(double d_eff_um, const cavsim_budget *b,
                                double *kappa_rad_s);
cavsim_status cavsim_outcoupling(const cavsim_budget *b, double *eta_c);

/* ---------- emitter model ---------- */

typedef struct cavsim_emitter cavsim_emitter;

cavsim_status cavsim_emitter_create(double gamma0_rad_s, double huang_rhys,
                                    cavsim_emitter **out);
cavsim_status cavsim_emitter_add_transition(cavsim_emitter *e, double omega_rad_s,
                                            double weight, double dephasing_rad_s);
/* Built-in six-transition NV model (weights stored verbatim, summing to 1.02). */
cavsim_status cavsim_emitter_nv_default(cavsim_emitter **out);
void cavsim_emitter_destroy(cavsim_emitter *e);

size_t cavsim_emitter_transition_count(const cavsim_emitter *e);
cavsim_status cavsim_emitter_transition_get(const cavsim_emitter *e, size_t k,
                                            double *omega_rad_s, double *weight,
                                            double *dephasing_rad_s);
cavsim_status cavsim_emitter_gamma0(const cavsim_emitter *e, double *gamma0_rad_s);
/* Rescale weights so they sum to 1 (explicit, never implicit). */
cavsim_status cavsim_emitter_normalize_weights(cavsim_emitter *e);

/* Displaced-oscillator branching weights e^-D D^k/k!, k = 0..k_max. */
cavsim_status cavsim_franck_condon(double huang_rhys, size_t k_max,
                                   double *weights);
/* Wavelength-density spectrum (per nm) of the summed unit-area Lorentzian
 * sidebands, evaluated on a caller grid (need not be uniform, must be >0). */
cavsim_status cavsim_emitter_spectrum(const cavsim_emitter *e,
                                      const double *wavelengths_nm, size_t n,
                                      double *density_per_nm);
/* S(lambda0)/max(S) by linear interpolation; lambda0 must lie inside the grid. */
cavsim_status cavsim_spectral_detuning(const double *wavelengths_nm,
                                       const double *density, size_t n,
                                       double lambda0_nm, double *eta_lambda);
/* Least-squares fit of weights and dephasing rates on a fixed frequency comb
 * (omega_rad_s, length k_count; NULL selects the built-in NV comb); relative
 * residuals; returns a new emitter plus the RMS relative residual.
 * CAVSIM_ERR_NO_CONVERGENCE still fills outputs (best-so-far). */
cavsim_status cavsim_fit_emitter_model(const double *wavelengths_nm,
                                       const double *values, size_t n,
                                       size_t k_count,
                                       const double *omega_rad_s,
                                       double gamma0_rad_s,
                                       cavsim_emitter **out,
                                       double *rms_rel_residual);
/* Gaussian instrument response, FWHM in nm, applied on the grid by quadrature. */
cavsim_status cavsim_convolve_gaussian(const double *wavelengths_nm,
                                       const double *values, size_t n,
                                       double fwhm_nm, double *out);

/* ---------- Purcell predictions ---------- */

cavsim_status cavsim_ideal_purcell(double lambda_nm, double q, double v_um3,
                                   double field_factor, double *c0);
cavsim_status cavsim_effective_purcell(double lambda0_nm, double q_em,
                                       double v_um3, double eta_lambda,
                                       double field_factor, double *c);
/* Dipole-orientation average for [111]-aligned ensembles; saturated=1 gives the
 * isotropic pumping limit. */
cavsim_status cavsim_orientation_factor(int saturated, double *eta_theta);
cavsim_status cavsim_coupling_rate(double omega_rad_s, double weight,
                                   double v_um3, double eta_e,
                                   double gamma0_rad_s, double cos_factor,
                                   double *g_rad_s);
/* Summed emission rate into one cavity mode at omega_c. kappa_per_transition
 * may be NULL, in which case kappa_scalar applies to every transition. */
cavsim_status cavsim_emission_rate(const cavsim_emitter *e, double v_um3,
                                   double eta_e, double eta_theta,
                                   double omega_c_rad_s,
                                   const double *kappa_per_transition,
                                   double kappa_scalar, double *rate_rad_s);
cavsim_status cavsim_collective_alpha(double n_emitters, double g0_rad_s,
                                      double kappa_rad_s, double dephasing_rad_s,
                                      double *alpha);

/* Volume sweep: for each d_eff compute V, the broadband effective Purcell
 * factor (emitter quality q_em, detuning eta_lambda) and the rate-model value.
 * Unstable geometries are skipped: their rows get NaN and n_ok counts the rest. */
cavsim_status cavsim_sweep_mode_volume(const cavsim_emitter *e, double roc_um,
                                       double lambda0_nm, const cavsim_budget *b,
                                       double eta_e, double eta_theta,
                                       double eta_lambda, double q_em,
                                       const double *d_eff_um, size_t n,
                                       double *v_um3, double *c_effective,
                                       double *c_rate, size_t *n_ok);

typedef struct cavsim_strong_coupling_report {
    double finesse;
    double kappa_rad_s;
    double g00_rad_s;       /* single-emitter, single-transition coupling */
    double c_rate;          /* rate-model enhancement at the given dephasing */
    int strong;             /* 1 when 2 g00 exceeds kappa, gamma0 and dephasing */
} cavsim_strong_coupling_report;

cavsim_status cavsim_strong_coupling(double wavelength_nm, double d_eff_um,
                                     double roc_um, const cavsim_budget *b,
                                     double zeta0, double eta_e,
                                     double gamma0_rad_s, double dephasing_rad_s,
                                     cavsim_strong_coupling_report *out);

/* ---------- measured-spectrum analysis ---------- */

/* Background on its own grid, resampled by linear interpolation; negative
 * differences clamp to zero, count reported via n_clamped (may be NULL). */
cavsim_status cavsim_background_correct(const double *wavelengths_nm,
                                        const double *raw, size_t n,
                                        const double *bg_wavelengths_nm,
                                        const double *bg, size_t n_bg,
                                        double *out, size_t *n_clamped);
/* Scale factor matching s_m to b * t2 * s0 on [win_lo, win_hi]; all three
 * arrays share the wavelength grid. */
cavsim_status cavsim_fit_scale_factor(const double *wavelengths_nm,
                                      const double *s_m, const double *t2,
                                      const double *s0, size_t n,
                                      double win_lo_nm, double win_hi_nm,
                                      double *b, double *rms_residual);

typedef struct cavsim_resonance {
    double lambda0_nm;
    double fwhm_nm;
    double power;            /* trapezoid over the window */
    double power_corrected;  /* power / window_fraction */
    double window_fraction;  /* Lorentzian fraction captured by the window */
} cavsim_resonance;

/* Integrate a resonance line over window_fwhms * fwhm centered on lambda0. */
cavsim_status cavsim_integrate_resonance(const double *wavelengths_nm,
                                         const double *values, size_t n,
                                         double lambda0_nm, double fwhm_nm,
                                         double window_fwhms,
                                         cavsim_resonance *out);
cavsim_status cavsim_integrate_band(const double *wavelengths_nm,
                                    const double *values, size_t n,
                                    double lo_nm, double hi_nm, double *power);
cavsim_status cavsim_experimental_purcell(double p_c, double p_fs,
                                          double eta_omega, double eta_c,
                                          double *c);
cavsim_status cavsim_peak_spectral_density(double p_c_full, double linewidth_nm,
                                           double *s_max);
cavsim_status cavsim_experimental_ideal_purcell(double s_c_max,
                                                double s_fs_at_lambda0,
                                                double eta_omega, double eta_c,
                                                double *c0);

typedef struct cavsim_saturation_fit {
    double p_inf;
    double i_sat;
    double a;                /* linear background slope */
    double rms_rel;          /* RMS relative residual */
} cavsim_saturation_fit;

cavsim_status cavsim_fit_saturation(const double *intensity_gw_m2,
                                    const double *counts_per_s, size_t n,
                                    cavsim_saturation_fit *out);
/* Peak intensity of a Gaussian beam, result in GW/m^2. */
cavsim_status cavsim_intensity_from_power(double power_w, double waist_um,
                                          double *intensity_gw_m2);

#ifdef __cplusplus
}
#endif

#endif /* CAVSIM_H */
