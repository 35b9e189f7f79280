#include "cavsim/cavsim.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/cavity.hpp"
#include "core/emitter.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/purcell.hpp"
#include "core/stack.hpp"

struct cavsim_stack {
    cavsim::layer_stack s;
};

struct cavsim_emitter {
    cavsim::emitter_model m;
};

namespace {

thread_local std::string g_error;

template <class F>
cavsim_status wrap(F &&f) noexcept {
    try {
        f();
        return CAVSIM_OK;
    } catch (const cavsim::validation_error &e) {
        g_error = e.what();
        return CAVSIM_ERR_INVALID_ARGUMENT;
    } catch (const cavsim::domain_error &e) {
        g_error = e.what();
        return CAVSIM_ERR_DOMAIN;
    } catch (const cavsim::convergence_error &e) {
        g_error = e.what();
        return CAVSIM_ERR_NO_CONVERGENCE;
    } catch (const cavsim::io_error &e) {
        g_error = e.what();
        return CAVSIM_ERR_IO;
    } catch (const std::exception &e) {
        g_error = e.what();
        return CAVSIM_ERR_INTERNAL;
    } catch (...) {
        g_error = "unknown error";
        return CAVSIM_ERR_INTERNAL;
    }
}

void need(bool ok, const char *what) {
    if (!ok) throw cavsim::validation_error(what);
}

cavsim::cavity_geometry to_core(const cavsim_geometry &g) {
    return {g.d_eff_um, g.roc_um, g.wavelength_nm};
}

cavsim::mirror_budget to_core(const cavsim_budget &b) {
    return {b.t1, b.l1, b.t2, b.l2};
}

// the built-in frequency comb the default NV catalog sits on
std::vector<double> builtin_comb(size_t k_count) {
    std::vector<double> omega(k_count);
    for (size_t k = 0; k < k_count; ++k)
        omega[k] = 2.0 * cavsim::pi * (470.0 - 16.0 * double(k)) * 1e12;
    return omega;
}

} // namespace

extern "C" {

const char *cavsim_last_error(void) { return g_error.c_str(); }

const char *cavsim_version(void) { return "0.1.0"; }

/* ---------- stacks ---------- */

cavsim_status cavsim_stack_create(double ambient_index, double substrate_index,
                                  cavsim_stack **out) {
    return wrap([&] {
        need(out != nullptr, "null output pointer");
        auto *h = new cavsim_stack;
        h->s.ambient = ambient_index;
        h->s.substrate = substrate_index;
        try {
            cavsim::check_stack(h->s);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

cavsim_status cavsim_stack_add_layer(cavsim_stack *s, double refractive_index,
                                     double thickness_nm) {
    return wrap([&] {
        need(s != nullptr, "null stack");
        need(refractive_index >= 1.0, "refractive index must be >= 1");
        need(thickness_nm > 0.0, "layer thickness must be positive");
        s->s.layers.push_back({refractive_index, thickness_nm});
    });
}

cavsim_status cavsim_stack_quarter_wave(double center_wavelength_nm,
                                        double n_high, double n_low, int pairs,
                                        double substrate_index,
                                        int terminate_low_quarter,
                                        cavsim_stack **out) {
    return wrap([&] {
        need(out != nullptr, "null output pointer");
        auto *h = new cavsim_stack;
        try {
            h->s = cavsim::quarter_wave_stack(center_wavelength_nm, n_high,
                                              n_low, pairs, substrate_index,
                                              terminate_low_quarter != 0);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

void cavsim_stack_destroy(cavsim_stack *s) { delete s; }

size_t cavsim_stack_layer_count(const cavsim_stack *s) {
    return s ? s->s.layers.size() : 0;
}

cavsim_status cavsim_stack_layer_get(const cavsim_stack *s, size_t i,
                                     double *refractive_index,
                                     double *thickness_nm) {
    return wrap([&] {
        need(s != nullptr, "null stack");
        need(i < s->s.layers.size(), "layer index out of range");
        if (refractive_index) *refractive_index = s->s.layers[i].index;
        if (thickness_nm) *thickness_nm = s->s.layers[i].thickness_nm;
    });
}

cavsim_status cavsim_stack_response_at(const cavsim_stack *s,
                                       double wavelength_nm,
                                       cavsim_stack_response *out) {
    return wrap([&] {
        need(s != nullptr && out != nullptr, "null argument");
        cavsim::stack_response r = cavsim::response_at(s->s, wavelength_nm);
        out->reflectance = r.reflectance;
        out->transmittance = r.transmittance;
        out->phase_rad = r.phase_rad;
    });
}

cavsim_status cavsim_stack_transmission_spectrum(const cavsim_stack *s,
                                                 double lambda_min_nm,
                                                 double lambda_max_nm,
                                                 size_t samples,
                                                 double *wavelengths_nm,
                                                 double *transmittance) {
    return wrap([&] {
        need(s != nullptr && wavelengths_nm != nullptr &&
                 transmittance != nullptr,
             "null argument");
        cavsim::transmission_spectrum(s->s, lambda_min_nm, lambda_max_nm,
                                      samples, wavelengths_nm, transmittance);
    });
}

cavsim_status cavsim_stack_penetration_depth(const cavsim_stack *s,
                                             double wavelength_nm,
                                             double *depth_um,
                                             int *in_stop_band) {
    return wrap([&] {
        need(s != nullptr && depth_um != nullptr, "null argument");
        bool in_band = false;
        double d = cavsim::penetration_depth_um(s->s, wavelength_nm, &in_band);
        *depth_um = d;
        if (in_stop_band) *in_stop_band = in_band ? 1 : 0;
    });
}

cavsim_status cavsim_stack_field_factor(const cavsim_stack *s,
                                        double wavelength_nm,
                                        double emitter_height_nm,
                                        double *eta_e) {
    return wrap([&] {
        need(s != nullptr && eta_e != nullptr, "null argument");
        *eta_e = cavsim::field_factor(s->s, wavelength_nm, emitter_height_nm);
    });
}

/* ---------- cavity geometry ---------- */

cavsim_status cavsim_effective_length_um(double lambda1_nm, double lambda2_nm,
                                         double *d_eff_um) {
    return wrap([&] {
        need(d_eff_um != nullptr, "null output pointer");
        *d_eff_um = cavsim::effective_length_um(lambda1_nm, lambda2_nm);
    });
}

cavsim_status cavsim_transverse_mode_spacing_nm(const cavsim_geometry *g,
                                                double *spacing_nm) {
    return wrap([&] {
        need(g != nullptr && spacing_nm != nullptr, "null argument");
        *spacing_nm = cavsim::transverse_mode_spacing_nm(to_core(*g));
    });
}

cavsim_status cavsim_roc_from_splitting_um(double spacing_nm,
                                           double wavelength_nm,
                                           double d_eff_um, double *roc_um) {
    return wrap([&] {
        need(roc_um != nullptr, "null output pointer");
        *roc_um =
            cavsim::roc_from_splitting_um(spacing_nm, wavelength_nm, d_eff_um);
    });
}

cavsim_status cavsim_mode_waist_um(const cavsim_geometry *g, double *w0_um) {
    return wrap([&] {
        need(g != nullptr && w0_um != nullptr, "null argument");
        *w0_um = cavsim::mode_waist_um(to_core(*g));
    });
}

cavsim_status cavsim_mode_volume_um3(const cavsim_geometry *g, double *v_um3) {
    return wrap([&] {
        need(g != nullptr && v_um3 != nullptr, "null argument");
        *v_um3 = cavsim::mode_volume_um3(to_core(*g));
    });
}

cavsim_status cavsim_finesse(const cavsim_budget *b, double *finesse) {
    return wrap([&] {
        need(b != nullptr && finesse != nullptr, "null argument");
        *finesse = cavsim::finesse(to_core(*b));
    });
}

cavsim_status cavsim_linewidth_nm(double lambda0_nm, double d_eff_um,
                                  const cavsim_budget *b,
                                  double *linewidth_nm) {
    return wrap([&] {
        need(b != nullptr && linewidth_nm != nullptr, "null argument");
        *linewidth_nm = cavsim::linewidth_nm(lambda0_nm, d_eff_um, to_core(*b));
    });
}

cavsim_status cavsim_quality_factor(double lambda0_nm, double linewidth_nm,
                                    double *q) {
    return wrap([&] {
        need(q != nullptr, "null output pointer");
        *q = cavsim::quality_factor(lambda0_nm, linewidth_nm);
    });
}

cavsim_status cavsim_decay_rate(double d_eff_um, const cavsim_budget *b,
                                double *kappa_rad_s) {
    return wrap([&] {
        need(b != nullptr && kappa_rad_s != nullptr, "null argument");
        *kappa_rad_s = cavsim::decay_rate_rad_s(d_eff_um, to_core(*b));
    });
}

cavsim_status cavsim_outcoupling(const cavsim_budget *b, double *eta_c) {
    return wrap([&] {
        need(b != nullptr && eta_c != nullptr, "null argument");
        *eta_c = cavsim::outcoupling(to_core(*b));
    });
}

/* ---------- emitter model ---------- */

cavsim_status cavsim_emitter_create(double gamma0_rad_s, double huang_rhys,
                                    cavsim_emitter **out) {
    return wrap([&] {
        need(out != nullptr, "null output pointer");
        need(gamma0_rad_s > 0.0, "radiative rate must be positive");
        need(huang_rhys >= 0.0, "Huang-Rhys factor must be >= 0");
        auto *h = new cavsim_emitter;
        h->m.gamma0_rad_s = gamma0_rad_s;
        h->m.huang_rhys = huang_rhys;
        *out = h;
    });
}

cavsim_status cavsim_emitter_add_transition(cavsim_emitter *e,
                                            double omega_rad_s, double weight,
                                            double dephasing_rad_s) {
    return wrap([&] {
        need(e != nullptr, "null emitter");
        cavsim::emitter_model next = e->m;
        next.transitions.push_back({omega_rad_s, weight, dephasing_rad_s});
        cavsim::check_emitter(next);
        e->m = std::move(next);
    });
}

cavsim_status cavsim_emitter_nv_default(cavsim_emitter **out) {
    return wrap([&] {
        need(out != nullptr, "null output pointer");
        auto *h = new cavsim_emitter;
        h->m = cavsim::nv_default_model();
        *out = h;
    });
}

void cavsim_emitter_destroy(cavsim_emitter *e) { delete e; }

size_t cavsim_emitter_transition_count(const cavsim_emitter *e) {
    return e ? e->m.transitions.size() : 0;
}

cavsim_status cavsim_emitter_transition_get(const cavsim_emitter *e, size_t k,
                                            double *omega_rad_s, double *weight,
                                            double *dephasing_rad_s) {
    return wrap([&] {
        need(e != nullptr, "null emitter");
        need(k < e->m.transitions.size(), "transition index out of range");
        const cavsim::transition &t = e->m.transitions[k];
        if (omega_rad_s) *omega_rad_s = t.omega_rad_s;
        if (weight) *weight = t.weight;
        if (dephasing_rad_s) *dephasing_rad_s = t.dephasing_rad_s;
    });
}

cavsim_status cavsim_emitter_gamma0(const cavsim_emitter *e,
                                    double *gamma0_rad_s) {
    return wrap([&] {
        need(e != nullptr && gamma0_rad_s != nullptr, "null argument");
        *gamma0_rad_s = e->m.gamma0_rad_s;
    });
}

cavsim_status cavsim_emitter_normalize_weights(cavsim_emitter *e) {
    return wrap([&] {
        need(e != nullptr, "null emitter");
        cavsim::normalize_weights(e->m);
    });
}

cavsim_status cavsim_franck_condon(double huang_rhys, size_t k_max,
                                   double *weights) {
    return wrap([&] {
        need(weights != nullptr, "null output pointer");
        std::vector<double> w = cavsim::franck_condon(huang_rhys, k_max);
        std::memcpy(weights, w.data(), w.size() * sizeof(double));
    });
}

cavsim_status cavsim_emitter_spectrum(const cavsim_emitter *e,
                                      const double *wavelengths_nm, size_t n,
                                      double *density_per_nm) {
    return wrap([&] {
        need(e != nullptr && wavelengths_nm != nullptr &&
                 density_per_nm != nullptr,
             "null argument");
        cavsim::spectrum_lambda(e->m, wavelengths_nm, n, density_per_nm);
    });
}

cavsim_status cavsim_spectral_detuning(const double *wavelengths_nm,
                                       const double *density, size_t n,
                                       double lambda0_nm, double *eta_lambda) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && density != nullptr &&
                 eta_lambda != nullptr,
             "null argument");
        *eta_lambda =
            cavsim::spectral_detuning(wavelengths_nm, density, n, lambda0_nm);
    });
}

cavsim_status cavsim_fit_emitter_model(const double *wavelengths_nm,
                                       const double *values, size_t n,
                                       size_t k_count,
                                       const double *omega_rad_s,
                                       double gamma0_rad_s,
                                       cavsim_emitter **out,
                                       double *rms_rel_residual) {
    cavsim_status st = wrap([&] {
        need(wavelengths_nm != nullptr && values != nullptr && out != nullptr,
             "null argument");
        need(k_count >= 1, "need at least one transition");
        std::vector<double> comb;
        if (omega_rad_s) {
            comb.assign(omega_rad_s, omega_rad_s + k_count);
        } else {
            need(k_count < 29, "built-in comb exhausted");
            comb = builtin_comb(k_count);
        }
        cavsim::emitter_fit_result fit = cavsim::fit_emitter(
            wavelengths_nm, values, n, comb, gamma0_rad_s);
        auto *h = new cavsim_emitter;
        h->m = std::move(fit.model);
        *out = h;
        if (rms_rel_residual) *rms_rel_residual = fit.rms_rel;
        if (!fit.converged)
            throw cavsim::convergence_error(
                "iteration budget exhausted; best-so-far model returned");
    });
    return st;
}

cavsim_status cavsim_convolve_gaussian(const double *wavelengths_nm,
                                       const double *values, size_t n,
                                       double fwhm_nm, double *out) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && values != nullptr && out != nullptr,
             "null argument");
        cavsim::convolve_gaussian(wavelengths_nm, values, n, fwhm_nm, out);
    });
}

/* ---------- Purcell ---------- */

cavsim_status cavsim_ideal_purcell(double lambda_nm, double q, double v_um3,
                                   double field_factor, double *c0) {
    return wrap([&] {
        need(c0 != nullptr, "null output pointer");
        *c0 = cavsim::ideal_purcell(lambda_nm, q, v_um3, field_factor);
    });
}

cavsim_status cavsim_effective_purcell(double lambda0_nm, double q_em,
                                       double v_um3, double eta_lambda,
                                       double field_factor, double *c) {
    return wrap([&] {
        need(c != nullptr, "null output pointer");
        *c = cavsim::effective_purcell(lambda0_nm, q_em, v_um3, eta_lambda,
                                       field_factor);
    });
}

cavsim_status cavsim_orientation_factor(int saturated, double *eta_theta) {
    return wrap([&] {
        need(eta_theta != nullptr, "null output pointer");
        *eta_theta = cavsim::orientation_factor(saturated != 0);
    });
}

cavsim_status cavsim_coupling_rate(double omega_rad_s, double weight,
                                   double v_um3, double eta_e,
                                   double gamma0_rad_s, double cos_factor,
                                   double *g_rad_s) {
    return wrap([&] {
        need(g_rad_s != nullptr, "null output pointer");
        *g_rad_s = cavsim::coupling_rate_rad_s(omega_rad_s, weight, v_um3,
                                               eta_e, gamma0_rad_s, cos_factor);
    });
}

cavsim_status cavsim_emission_rate(const cavsim_emitter *e, double v_um3,
                                   double eta_e, double eta_theta,
                                   double omega_c_rad_s,
                                   const double *kappa_per_transition,
                                   double kappa_scalar, double *rate_rad_s) {
    return wrap([&] {
        need(e != nullptr && rate_rad_s != nullptr, "null argument");
        std::vector<double> kappas;
        if (kappa_per_transition)
            kappas.assign(kappa_per_transition,
                          kappa_per_transition + e->m.transitions.size());
        *rate_rad_s = cavsim::emission_rate_rad_s(
            e->m, v_um3, eta_e, eta_theta, omega_c_rad_s, kappas, kappa_scalar);
    });
}

cavsim_status cavsim_collective_alpha(double n_emitters, double g0_rad_s,
                                      double kappa_rad_s,
                                      double dephasing_rad_s, double *alpha) {
    return wrap([&] {
        need(alpha != nullptr, "null output pointer");
        *alpha = cavsim::collective_alpha(n_emitters, g0_rad_s, kappa_rad_s,
                                          dephasing_rad_s);
    });
}

cavsim_status cavsim_sweep_mode_volume(const cavsim_emitter *e, double roc_um,
                                       double lambda0_nm,
                                       const cavsim_budget *b, double eta_e,
                                       double eta_theta, double eta_lambda,
                                       double q_em, const double *d_eff_um,
                                       size_t n, double *v_um3,
                                       double *c_effective, double *c_rate,
                                       size_t *n_ok) {
    return wrap([&] {
        need(e != nullptr && b != nullptr && d_eff_um != nullptr &&
                 v_um3 != nullptr && c_effective != nullptr &&
                 c_rate != nullptr,
             "null argument");
        std::vector<double> d(d_eff_um, d_eff_um + n);
        std::vector<cavsim::volume_sweep_row> rows = cavsim::sweep_mode_volume(
            e->m, roc_um, lambda0_nm, to_core(*b), eta_e, eta_theta, eta_lambda,
            q_em, d);
        size_t ok = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            v_um3[i] = rows[i].v_um3;
            c_effective[i] = rows[i].c_effective;
            c_rate[i] = rows[i].c_rate;
            if (rows[i].ok) ++ok;
        }
        if (n_ok) *n_ok = ok;
    });
}

cavsim_status cavsim_strong_coupling(double wavelength_nm, double d_eff_um,
                                     double roc_um, const cavsim_budget *b,
                                     double zeta0, double eta_e,
                                     double gamma0_rad_s,
                                     double dephasing_rad_s,
                                     cavsim_strong_coupling_report *out) {
    return wrap([&] {
        need(b != nullptr && out != nullptr, "null argument");
        cavsim::strong_coupling_report r = cavsim::strong_coupling(
            wavelength_nm, d_eff_um, roc_um, to_core(*b), zeta0, eta_e,
            gamma0_rad_s, dephasing_rad_s);
        out->finesse = r.finesse;
        out->kappa_rad_s = r.kappa_rad_s;
        out->g00_rad_s = r.g00_rad_s;
        out->c_rate = r.c_rate;
        out->strong = r.strong ? 1 : 0;
    });
}

/* ---------- analysis ---------- */

cavsim_status cavsim_background_correct(const double *wavelengths_nm,
                                        const double *raw, size_t n,
                                        const double *bg_wavelengths_nm,
                                        const double *bg, size_t n_bg,
                                        double *out, size_t *n_clamped) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && raw != nullptr &&
                 bg_wavelengths_nm != nullptr && bg != nullptr &&
                 out != nullptr,
             "null argument");
        cavsim::background_correct(wavelengths_nm, raw, n, bg_wavelengths_nm,
                                   bg, n_bg, out, n_clamped);
    });
}

cavsim_status cavsim_fit_scale_factor(const double *wavelengths_nm,
                                      const double *s_m, const double *t2,
                                      const double *s0, size_t n,
                                      double win_lo_nm, double win_hi_nm,
                                      double *b, double *rms_residual) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && s_m != nullptr && t2 != nullptr &&
                 s0 != nullptr && b != nullptr,
             "null argument");
        *b = cavsim::fit_scale_factor(wavelengths_nm, s_m, t2, s0, n, win_lo_nm,
                                      win_hi_nm, rms_residual);
    });
}

cavsim_status cavsim_integrate_resonance(const double *wavelengths_nm,
                                         const double *values, size_t n,
                                         double lambda0_nm, double fwhm_nm,
                                         double window_fwhms,
                                         cavsim_resonance *out) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && values != nullptr && out != nullptr,
             "null argument");
        cavsim::resonance_peak r = cavsim::integrate_resonance(
            wavelengths_nm, values, n, lambda0_nm, fwhm_nm, window_fwhms);
        out->lambda0_nm = r.lambda0_nm;
        out->fwhm_nm = r.fwhm_nm;
        out->power = r.power;
        out->power_corrected = r.power_corrected;
        out->window_fraction = r.window_fraction;
    });
}

cavsim_status cavsim_integrate_band(const double *wavelengths_nm,
                                    const double *values, size_t n,
                                    double lo_nm, double hi_nm, double *power) {
    return wrap([&] {
        need(wavelengths_nm != nullptr && values != nullptr &&
                 power != nullptr,
             "null argument");
        *power = cavsim::integrate_band(wavelengths_nm, values, n, lo_nm, hi_nm);
    });
}

cavsim_status cavsim_experimental_purcell(double p_c, double p_fs,
                                          double eta_omega, double eta_c,
                                          double *c) {
    return wrap([&] {
        need(c != nullptr, "null output pointer");
        *c = cavsim::experimental_purcell(p_c, p_fs, eta_omega, eta_c);
    });
}

cavsim_status cavsim_peak_spectral_density(double p_c_full, double linewidth_nm,
                                           double *s_max) {
    return wrap([&] {
        need(s_max != nullptr, "null output pointer");
        *s_max = cavsim::peak_spectral_density(p_c_full, linewidth_nm);
    });
}

cavsim_status cavsim_experimental_ideal_purcell(double s_c_max,
                                                double s_fs_at_lambda0,
                                                double eta_omega, double eta_c,
                                                double *c0) {
    return wrap([&] {
        need(c0 != nullptr, "null output pointer");
        *c0 = cavsim::experimental_ideal_purcell(s_c_max, s_fs_at_lambda0,
                                                 eta_omega, eta_c);
    });
}

cavsim_status cavsim_fit_saturation(const double *intensity_gw_m2,
                                    const double *counts_per_s, size_t n,
                                    cavsim_saturation_fit *out) {
    return wrap([&] {
        need(intensity_gw_m2 != nullptr && counts_per_s != nullptr &&
                 out != nullptr,
             "null argument");
        cavsim::saturation_fit f =
            cavsim::fit_saturation(intensity_gw_m2, counts_per_s, n);
        if (!f.identified)
            throw cavsim::domain_error(
                "no saturation knee: data are consistent with a straight line");
        out->p_inf = f.p_inf;
        out->i_sat = f.i_sat;
        out->a = f.a;
        out->rms_rel = f.rms_rel;
    });
}

cavsim_status cavsim_intensity_from_power(double power_w, double waist_um,
                                          double *intensity_gw_m2) {
    return wrap([&] {
        need(intensity_gw_m2 != nullptr, "null output pointer");
        *intensity_gw_m2 =
            cavsim::intensity_from_power_gw_m2(power_w, waist_um);
    });
}

} /* extern "C" */
