#include "cavity.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

void check_geometry(const cavity_geometry &g) {
    require(g.wavelength_nm > 0.0, "wavelength must be positive");
    require(g.d_eff_um > 0.0, "effective length must be positive");
    require(g.d_eff_um < g.roc_um, "unstable geometry: need d_eff < roc");
}

void check_budget(const mirror_budget &b) {
    require(b.t1 >= 0.0 && b.l1 >= 0.0 && b.t2 >= 0.0 && b.l2 >= 0.0,
            "budget terms must be non-negative");
    require(b.t1 + b.l1 + b.t2 + b.l2 < 1.0, "total mirror loss must be < 1");
}

namespace {
double total_loss(const mirror_budget &b) { return b.t1 + b.l1 + b.t2 + b.l2; }

double sqrt_r1r2(const mirror_budget &b) {
    double r1 = 1.0 - b.t1 - b.l1;
    double r2 = 1.0 - b.t2 - b.l2;
    require(r1 > 0.0 && r2 > 0.0, "per-mirror loss must stay below 1");
    return std::sqrt(r1 * r2);
}
} // namespace

double effective_length_um(double lambda1_nm, double lambda2_nm) {
    double lo = std::min(lambda1_nm, lambda2_nm);
    double hi = std::max(lambda1_nm, lambda2_nm);
    require(lo > 0.0, "wavelengths must be positive");
    require(hi > lo, "need two distinct resonances");
    return lo * hi / (2.0 * (hi - lo)) * 1e-3;
}

double transverse_mode_spacing_nm(const cavity_geometry &g) {
    check_geometry(g);
    double x = 1.0 - g.d_eff_um / g.roc_um;
    double d_nm = g.d_eff_um * 1e3;
    return g.wavelength_nm * g.wavelength_nm * std::acos(std::sqrt(x)) /
           (2.0 * pi * d_nm);
}

double roc_from_splitting_um(double spacing_nm, double wavelength_nm,
                             double d_eff_um) {
    require(wavelength_nm > 0.0 && d_eff_um > 0.0, "inputs must be positive");
    require(spacing_nm > 0.0, "splitting must be positive");
    double d_nm = d_eff_um * 1e3;
    double theta = 2.0 * pi * d_nm * spacing_nm / (wavelength_nm * wavelength_nm);
    if (theta >= 0.5 * pi)
        throw domain_error("transverse splitting too large for a stable geometry");
    double s = std::sin(theta);
    return d_eff_um / (s * s);
}

double mode_waist_um(const cavity_geometry &g) {
    check_geometry(g);
    double lam_um = g.wavelength_nm * 1e-3;
    double arg = g.roc_um * g.d_eff_um - g.d_eff_um * g.d_eff_um;
    return std::sqrt(lam_um / pi * std::sqrt(arg));
}

double mode_volume_um3(const cavity_geometry &g) {
    double w0 = mode_waist_um(g);
    return pi * w0 * w0 * g.d_eff_um / 4.0;
}

double finesse(const mirror_budget &b) {
    check_budget(b);
    double s = sqrt_r1r2(b);
    require(s < 1.0, "lossless mirrors give unbounded finesse");
    return pi * std::sqrt(s) / (1.0 - s);
}

double linewidth_nm(double lambda0_nm, double d_eff_um, const mirror_budget &b) {
    require(lambda0_nm > 0.0 && d_eff_um > 0.0, "inputs must be positive");
    check_budget(b);
    double d_nm = d_eff_um * 1e3;
    return lambda0_nm * lambda0_nm * total_loss(b) /
           (4.0 * pi * d_nm * sqrt_r1r2(b));
}

double quality_factor(double lambda0_nm, double linewidth_nm_) {
    require(lambda0_nm > 0.0, "wavelength must be positive");
    require(linewidth_nm_ > 0.0, "linewidth must be positive");
    return lambda0_nm / linewidth_nm_;
}

double decay_rate_rad_s(double d_eff_um, const mirror_budget &b) {
    require(d_eff_um > 0.0, "effective length must be positive");
    check_budget(b);
    return c_m_s * total_loss(b) / (2.0 * d_eff_um * 1e-6 * sqrt_r1r2(b));
}

double outcoupling(const mirror_budget &b) {
    check_budget(b);
    double s = total_loss(b);
    require(s > 0.0, "all-zero budget");
    return b.t2 / s;
}

bool paraxial_ok(const cavity_geometry &g) {
    double w0 = mode_waist_um(g);
    return g.d_eff_um < 0.9 * g.roc_um && w0 * 1e3 >= g.wavelength_nm;
}

} // namespace cavsim
