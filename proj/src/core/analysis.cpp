#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

void background_correct(const double *wavelengths_nm, const double *raw,
                        std::size_t n, const double *bg_wavelengths_nm,
                        const double *bg, std::size_t n_bg, double *out,
                        std::size_t *n_clamped) {
    require(n >= 2 && n_bg >= 2, "grids too short");
    require(strictly_increasing(wavelengths_nm, n) &&
                strictly_increasing(bg_wavelengths_nm, n_bg),
            "grids must be strictly increasing");
    double lo = std::max(wavelengths_nm[0], bg_wavelengths_nm[0]);
    double hi = std::min(wavelengths_nm[n - 1], bg_wavelengths_nm[n_bg - 1]);
    double span = wavelengths_nm[n - 1] - wavelengths_nm[0];
    if (hi - lo < 0.5 * span)
        throw validation_error("background grid overlaps less than half the data");
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::clamp(wavelengths_nm[i], bg_wavelengths_nm[0],
                              bg_wavelengths_nm[n_bg - 1]);
        double v = raw[i] - lerp_at(bg_wavelengths_nm, bg, n_bg, x);
        if (v < 0.0) {
            v = 0.0;
            ++clamped;
        }
        out[i] = v;
    }
    if (n_clamped) *n_clamped = clamped;
}

double fit_scale_factor(const double *wavelengths_nm, const double *s_m,
                        const double *t2, const double *s0, std::size_t n,
                        double win_lo_nm, double win_hi_nm,
                        double *rms_residual) {
    require(n >= 2, "grid too short");
    require(strictly_increasing(wavelengths_nm, n),
            "grid must be strictly increasing");
    require(win_lo_nm < win_hi_nm, "empty fit window");
    double num = 0.0, den = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (wavelengths_nm[i] < win_lo_nm || wavelengths_nm[i] > win_hi_nm)
            continue;
        double reg = t2[i] * s0[i];
        num += s_m[i] * reg;
        den += reg * reg;
        ++used;
    }
    require(used > 0, "fit window contains no samples");
    require(den > 0.0, "regressor is zero over the fit window");
    double b = num / den;
    if (rms_residual) {
        double acc = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (wavelengths_nm[i] < win_lo_nm || wavelengths_nm[i] > win_hi_nm)
                continue;
            double e = s_m[i] - b * t2[i] * s0[i];
            acc += e * e;
            peak = std::max(peak, std::abs(s_m[i]));
        }
        *rms_residual = peak > 0.0 ? std::sqrt(acc / double(used)) / peak : 0.0;
    }
    return b;
}

resonance_peak integrate_resonance(const double *wavelengths_nm,
                                   const double *values, std::size_t n,
                                   double lambda0_nm, double fwhm_nm,
                                   double window_fwhms) {
    require(n >= 2, "grid too short");
    require(fwhm_nm > 0.0, "linewidth must be positive");
    require(window_fwhms > 0.0, "window must be positive");
    double half = 0.5 * window_fwhms * fwhm_nm;
    require(lambda0_nm - half >= wavelengths_nm[0] &&
                lambda0_nm + half <= wavelengths_nm[n - 1],
            "integration window escapes the grid");
    resonance_peak out;
    out.lambda0_nm = lambda0_nm;
    out.fwhm_nm = fwhm_nm;
    out.power = trapezoid_band(wavelengths_nm, values, n, lambda0_nm - half,
                               lambda0_nm + half);
    out.window_fraction = 2.0 / pi * std::atan(window_fwhms);
    out.power_corrected = out.power / out.window_fraction;
    return out;
}

double integrate_band(const double *wavelengths_nm, const double *values,
                      std::size_t n, double lo_nm, double hi_nm) {
    require(n >= 2, "grid too short");
    require(lo_nm < hi_nm, "empty band");
    return trapezoid_band(wavelengths_nm, values, n, lo_nm, hi_nm);
}

double experimental_purcell(double p_c, double p_fs, double eta_omega,
                            double eta_c) {
    require(p_c >= 0.0, "cavity power must be >= 0");
    require(p_fs > 0.0, "free-space power must be positive");
    require(eta_omega > 0.0 && eta_omega <= 1.0 && eta_c > 0.0 && eta_c <= 1.0,
            "efficiencies must be in (0,1]");
    return p_c / p_fs * (eta_omega / eta_c);
}

double peak_spectral_density(double p_c_full, double linewidth_nm) {
    require(p_c_full >= 0.0, "power must be >= 0");
    require(linewidth_nm > 0.0, "linewidth must be positive");
    return 2.0 * p_c_full / (pi * linewidth_nm);
}

double experimental_ideal_purcell(double s_c_max, double s_fs_at_lambda0,
                                  double eta_omega, double eta_c) {
    require(s_c_max >= 0.0, "peak density must be >= 0");
    require(s_fs_at_lambda0 > 0.0, "free-space density must be positive");
    require(eta_omega > 0.0 && eta_omega <= 1.0 && eta_c > 0.0 && eta_c <= 1.0,
            "efficiencies must be in (0,1]");
    return s_c_max / s_fs_at_lambda0 * (eta_omega / eta_c);
}

namespace {

// weighted linear LS for (p_inf, a) at fixed knee; returns summed squared
// weighted residual
double profile_linear(const double *I, const double *P, const double *w,
                      std::size_t n, double i_sat, double *p_inf, double *a) {
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x1 = w[i] * I[i] / (i_sat + I[i]);
        double x2 = w[i] * I[i];
        double y = w[i] * P[i];
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
    }
    double det = s11 * s22 - s12 * s12;
    double pi_, a_;
    if (std::abs(det) < 1e-300) {
        pi_ = s11 > 0.0 ? b1 / s11 : 0.0;
        a_ = 0.0;
    } else {
        pi_ = (b1 * s22 - b2 * s12) / det;
        a_ = (s11 * b2 - s12 * b1) / det;
    }
    if (p_inf) *p_inf = pi_;
    if (a) *a = a_;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = w[i] * (P[i] - pi_ * I[i] / (i_sat + I[i]) - a_ * I[i]);
        cost += e * e;
    }
    return cost;
}

} // namespace

saturation_fit fit_saturation(const double *intensity_gw_m2,
                              const double *counts_per_s, std::size_t n) {
    require(n >= 4, "need at least 4 points");
    double pmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        require(intensity_gw_m2[i] > 0.0, "intensities must be positive");
        require(counts_per_s[i] >= 0.0, "counts must be >= 0");
        pmax = std::max(pmax, counts_per_s[i]);
    }
    require(pmax > 0.0, "all-zero counts");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 1.0 / std::max(counts_per_s[i], 1e-9 * pmax);
    std::vector<double> sorted(intensity_gw_m2, intensity_gw_m2 + n);
    std::sort(sorted.begin(), sorted.end());
    double med = sorted[n / 2];

    auto cost_at = [&](double i_sat) {
        return profile_linear(intensity_gw_m2, counts_per_s, w.data(), n, i_sat,
                              nullptr, nullptr);
    };
    double lo = 0.05 * med, hi = 20.0 * med;
    double best = lo, best_cost = cost_at(lo);
    for (int i = 1; i < 200; ++i) {
        double cand = lo * std::pow(hi / lo, double(i) / 199.0);
        double c = cost_at(cand);
        if (c < best_cost) {
            best_cost = c;
            best = cand;
        }
    }
    double bracket = std::pow(hi / lo, 1.0 / 199.0);
    double i_sat = golden_min(cost_at, best / bracket, best * bracket, 80);

    saturation_fit out;
    best_cost = profile_linear(intensity_gw_m2, counts_per_s, w.data(), n,
                               i_sat, &out.p_inf, &out.a);
    out.i_sat = i_sat;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double model = out.p_inf * intensity_gw_m2[i] / (i_sat + intensity_gw_m2[i]) +
                       out.a * intensity_gw_m2[i];
        double rel = (counts_per_s[i] - model) /
                     std::max(counts_per_s[i], 1e-9 * pmax);
        acc += rel * rel;
    }
    out.rms_rel = std::sqrt(acc / double(n));

    // pure-linear data pushes the knee to the top of the scan range (the
    // saturating basis function degenerates into the linear one there)
    out.identified = out.p_inf > 0.0 && i_sat < 0.9 * hi;
    return out;
}

double intensity_from_power_gw_m2(double power_w, double waist_um) {
    require(power_w >= 0.0, "power must be >= 0");
    require(waist_um > 0.0, "waist must be positive");
    double w_m = waist_um * 1e-6;
    return 2.0 * power_w / (pi * w_m * w_m) * 1e-9;
}

} // namespace cavsim
