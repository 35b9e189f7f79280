#include "emitter.hpp"

#include <cmath>

#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

void check_emitter(const emitter_model &m) {
    require(m.gamma0_rad_s > 0.0, "radiative rate must be positive");
    require(m.huang_rhys >= 0.0, "Huang-Rhys factor must be >= 0");
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < m.transitions.size(); ++k) {
        const transition &t = m.transitions[k];
        require(t.omega_rad_s > 0.0, "transition frequency must be positive");
        require(t.weight >= 0.0 && t.weight <= 1.0, "weight must be in [0,1]");
        require(t.dephasing_rad_s >= 0.0, "dephasing must be >= 0");
        if (k > 0)
            require(t.omega_rad_s < prev, "transition frequencies must decrease");
        prev = t.omega_rad_s;
        sum += t.weight;
    }
    // the verbatim catalog sums to 1.02; allow that much slack, nothing wilder
    require(sum <= 1.05, "weights sum significantly above 1");
}

emitter_model nv_default_model() {
    emitter_model m;
    m.gamma0_rad_s = 2.0 * pi * 8e6;
    m.huang_rhys = 3.2;
    const double w[6] = {0.02, 0.25, 0.44, 0.24, 0.06, 0.01};
    const double g_thz[6] = {3.0, 23.0, 25.0, 29.0, 34.0, 40.0};
    for (int k = 0; k < 6; ++k) {
        transition t;
        t.omega_rad_s = 2.0 * pi * (470.0 - 16.0 * k) * 1e12;
        t.weight = w[k];
        t.dephasing_rad_s = 2.0 * pi * g_thz[k] * 1e12;
        m.transitions.push_back(t);
    }
    return m;
}

std::vector<double> franck_condon(double huang_rhys, std::size_t k_max) {
    require(huang_rhys >= 0.0, "Huang-Rhys factor must be >= 0");
    std::vector<double> w(k_max + 1);
    w[0] = std::exp(-huang_rhys);
    for (std::size_t k = 1; k <= k_max; ++k)
        w[k] = w[k - 1] * huang_rhys / double(k);
    return w;
}

void normalize_weights(emitter_model &m) {
    double sum = 0.0;
    for (const transition &t : m.transitions) sum += t.weight;
    require(sum > 0.0, "cannot normalize all-zero weights");
    for (transition &t : m.transitions) t.weight /= sum;
}

double spectral_density_omega(const emitter_model &m, double omega_rad_s) {
    double acc = 0.0;
    for (const transition &t : m.transitions) {
        double d = omega_rad_s - t.omega_rad_s;
        double hw = 0.5 * t.dephasing_rad_s;
        acc += t.weight * (t.dephasing_rad_s / (2.0 * pi)) / (d * d + hw * hw);
    }
    return acc;
}

void spectrum_lambda(const emitter_model &m, const double *wavelengths_nm,
                     std::size_t n, double *density_per_nm) {
    require(n >= 1, "empty wavelength grid");
    require(wavelengths_nm[0] > 0.0, "wavelengths must be positive");
    require(strictly_increasing(wavelengths_nm, n),
            "wavelength grid must be strictly increasing");
    check_emitter(m);
    for (std::size_t i = 0; i < n; ++i) {
        double lam = wavelengths_nm[i];
        double omega = omega_from_lambda_nm(lam);
        double jac = 2.0 * pi * c_nm_s / (lam * lam);  // |domega/dlambda|
        density_per_nm[i] = spectral_density_omega(m, omega) * jac;
    }
}

double spectral_detuning(const double *wavelengths_nm, const double *density,
                         std::size_t n, double lambda0_nm) {
    require(n >= 2, "grid too short");
    require(strictly_increasing(wavelengths_nm, n),
            "wavelength grid must be strictly increasing");
    require(lambda0_nm >= wavelengths_nm[0] && lambda0_nm <= wavelengths_nm[n - 1],
            "evaluation wavelength outside spectrum grid");
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, density[i]);
    require(peak > 0.0, "all-zero spectrum");
    return lerp_at(wavelengths_nm, density, n, lambda0_nm) / peak;
}

void convolve_gaussian(const double *wavelengths_nm, const double *values,
                       std::size_t n, double fwhm_nm, double *out) {
    require(n >= 2, "grid too short");
    require(fwhm_nm > 0.0, "instrument width must be positive");
    require(strictly_increasing(wavelengths_nm, n),
            "wavelength grid must be strictly increasing");
    double sigma = fwhm_nm / 2.35482004503094938;
    double cutoff = 5.0 * sigma;
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        double x0 = wavelengths_nm[i];
        // trapezoid against the kernel; renormalize so flats stay flat at edges
        for (std::size_t j = 1; j < n; ++j) {
            double xa = wavelengths_nm[j - 1], xb = wavelengths_nm[j];
            if (xb < x0 - cutoff || xa > x0 + cutoff) continue;
            double da = (xa - x0) / sigma, db = (xb - x0) / sigma;
            double ga = std::exp(-0.5 * da * da), gb = std::exp(-0.5 * db * db);
            double w = 0.5 * (xb - xa);
            num += w * (ga * values[j - 1] + gb * values[j]);
            den += w * (ga + gb);
        }
        out[i] = den > 0.0 ? num / den : values[i];
    }
}

} // namespace cavsim
