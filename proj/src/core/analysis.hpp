#pragma once

#include <cstddef>

namespace cavsim {

// background on its own grid, linear-resampled; negatives clamp to zero
// (count returned). Grids must overlap by at least half the data range.
void background_correct(const double *wavelengths_nm, const double *raw,
                        std::size_t n, const double *bg_wavelengths_nm,
                        const double *bg, std::size_t n_bg, double *out,
                        std::size_t *n_clamped);

// scale factor matching s_m ~ b * t2 * s0 on [win_lo, win_hi] (closed-form
// linear least squares); rms is relative to the window peak of s_m
double fit_scale_factor(const double *wavelengths_nm, const double *s_m,
                        const double *t2, const double *s0, std::size_t n,
                        double win_lo_nm, double win_hi_nm,
                        double *rms_residual);

struct resonance_peak {
    double lambda0_nm;
    double fwhm_nm;
    double power;            // trapezoid over the window
    double power_corrected;  // power / window_fraction
    double window_fraction;  // Lorentzian capture fraction of the window
};

resonance_peak integrate_resonance(const double *wavelengths_nm,
                                   const double *values, std::size_t n,
                                   double lambda0_nm, double fwhm_nm,
                                   double window_fwhms);

double integrate_band(const double *wavelengths_nm, const double *values,
                      std::size_t n, double lo_nm, double hi_nm);

double experimental_purcell(double p_c, double p_fs, double eta_omega,
                            double eta_c);
double peak_spectral_density(double p_c_full, double linewidth_nm);
double experimental_ideal_purcell(double s_c_max, double s_fs_at_lambda0,
                                  double eta_omega, double eta_c);

struct saturation_fit {
    double p_inf;
    double i_sat;
    double a;        // linear background slope
    double rms_rel;  // RMS relative residual
    bool identified; // false when the knee is not identifiable (pure linear)
};

// P(I) = P_inf I/(I_sat + I) + a I. Linear parameters profiled out with
// 1/P weighting, I_sat by scan + golden section.
saturation_fit fit_saturation(const double *intensity_gw_m2,
                              const double *counts_per_s, std::size_t n);

double intensity_from_power_gw_m2(double power_w, double waist_um);

} // namespace cavsim
