#pragma once

#include <cstddef>
#include <vector>

namespace cavsim {

struct transition {
    double omega_rad_s;      // center angular frequency
    double weight;           // branching weight, [0, 1]
    double dephasing_rad_s;  // effective sideband width (FWHM in omega)
};

struct emitter_model {
    double gamma0_rad_s = 0.0;  // radiative decay rate
    double huang_rhys = 0.0;
    std::vector<transition> transitions;  // frequencies strictly decreasing
};

void check_emitter(const emitter_model &m);

// six-transition NV model; weights stored verbatim (they sum to 1.02)
emitter_model nv_default_model();

// displaced-oscillator branching weights e^-D D^k / k!, k = 0..k_max
std::vector<double> franck_condon(double huang_rhys, std::size_t k_max);

// explicit weight normalization; never applied implicitly
void normalize_weights(emitter_model &m);

// summed unit-area Lorentzians, angular-frequency density
double spectral_density_omega(const emitter_model &m, double omega_rad_s);

// wavelength density (per nm) on a strictly increasing grid
void spectrum_lambda(const emitter_model &m, const double *wavelengths_nm,
                     std::size_t n, double *density_per_nm);

// S(lambda0)/max S via linear interpolation
double spectral_detuning(const double *wavelengths_nm, const double *density,
                         std::size_t n, double lambda0_nm);

// Gaussian instrument response applied by quadrature on the grid
void convolve_gaussian(const double *wavelengths_nm, const double *values,
                       std::size_t n, double fwhm_nm, double *out);

struct emitter_fit_result {
    emitter_model model;
    double rms_rel = 0.0;  // RMS misfit relative to the spectrum peak
    bool converged = false;  // false leaves best-so-far in `model`
};

// weights + dephasing rates fitted on a fixed frequency comb; relative
// residuals (multiplicative-noise likelihood); Levenberg-Marquardt with
// analytic Jacobian, positivity by squared parametrization
emitter_fit_result fit_emitter(const double *wavelengths_nm,
                               const double *values, std::size_t n,
                               const std::vector<double> &omega_comb_rad_s,
                               double gamma0_rad_s);

} // namespace cavsim
