#include "purcell.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

double ideal_purcell(double lambda_nm, double q, double v_um3,
                     double field_factor) {
    require(lambda_nm > 0.0 && q > 0.0 && v_um3 > 0.0, "inputs must be positive");
    require(field_factor >= 0.0 && field_factor <= 1.0,
            "field factor must be in [0,1]");
    double lam_um = lambda_nm * 1e-3;
    return 3.0 * lam_um * lam_um * lam_um / (4.0 * pi * pi) * q / v_um3 *
           field_factor;
}

double effective_purcell(double lambda0_nm, double q_em, double v_um3,
                         double eta_lambda, double field_factor) {
    require(eta_lambda >= 0.0 && eta_lambda <= 1.0,
            "spectral factor must be in [0,1]");
    return ideal_purcell(lambda0_nm, q_em, v_um3, field_factor) * eta_lambda;
}

double orientation_factor(bool saturated) {
    // p(theta) = 3/2 cos^2 below saturation, uniform above; projection cos^2,
    // solid-angle measure cos(theta) d(theta)
    auto below = [](double th) {
        double c = std::cos(th);
        return 1.5 * c * c * c * c * c;
    };
    auto iso_num = [](double th) {
        double c = std::cos(th);
        return c * c * c;
    };
    auto iso_den = [](double th) { return std::cos(th); };
    if (!saturated) return integrate(below, 0.0, 0.5 * pi, 1e-9);
    return integrate(iso_num, 0.0, 0.5 * pi, 1e-9) /
           integrate(iso_den, 0.0, 0.5 * pi, 1e-9);
}

double orientation_norm() {
    auto f = [](double th) {
        double c = std::cos(th);
        return 1.5 * c * c * c;
    };
    return integrate(f, 0.0, 0.5 * pi, 1e-9);
}

double coupling_rate_rad_s(double omega_rad_s, double weight, double v_um3,
                           double eta_e, double gamma0_rad_s,
                           double cos_factor) {
    require(omega_rad_s > 0.0 && v_um3 > 0.0 && gamma0_rad_s > 0.0,
            "inputs must be positive");
    require(weight >= 0.0 && eta_e >= 0.0 && eta_e <= 1.0,
            "weight must be >= 0 and field factor in [0,1]");
    double v_m3 = v_um3 * 1e-18;
    double c3 = c_m_s * c_m_s * c_m_s;
    double g2 = 3.0 * pi * c3 / (2.0 * omega_rad_s * omega_rad_s * v_m3) *
                weight * eta_e * gamma0_rad_s;
    return std::sqrt(g2) * cos_factor;
}

double emission_rate_rad_s(const emitter_model &m, double v_um3, double eta_e,
                           double eta_theta, double omega_c_rad_s,
                           const std::vector<double> &kappa_per_transition,
                           double kappa_scalar) {
    check_emitter(m);
    require(omega_c_rad_s > 0.0, "cavity frequency must be positive");
    require(eta_theta >= 0.0 && eta_theta <= 1.0,
            "orientation factor must be in [0,1]");
    if (!kappa_per_transition.empty())
        require(kappa_per_transition.size() == m.transitions.size(),
                "per-transition decay list does not match the model");
    double rate = 0.0;
    for (std::size_t k = 0; k < m.transitions.size(); ++k) {
        const transition &t = m.transitions[k];
        double kap = kappa_per_transition.empty() ? kappa_scalar
                                                  : kappa_per_transition[k];
        require(kap >= 0.0, "decay rate must be >= 0");
        double g = coupling_rate_rad_s(t.omega_rad_s, t.weight, v_um3, eta_e,
                                       m.gamma0_rad_s, std::sqrt(eta_theta));
        double gamma_total = kap + m.gamma0_rad_s + t.dephasing_rad_s;
        double delta = omega_c_rad_s - t.omega_rad_s;
        rate += 4.0 * g * g * gamma_total /
                (gamma_total * gamma_total + 4.0 * delta * delta);
    }
    return rate;
}

double collective_alpha(double n_emitters, double g0_rad_s, double kappa_rad_s,
                        double dephasing_rad_s) {
    require(n_emitters >= 0.0, "emitter count must be >= 0");
    require(g0_rad_s >= 0.0, "coupling rate must be >= 0");
    require(kappa_rad_s > 0.0 && dephasing_rad_s > 0.0,
            "decay and dephasing rates must be positive");
    return n_emitters * (4.0 * g0_rad_s * g0_rad_s / kappa_rad_s) /
           dephasing_rad_s;
}

std::vector<volume_sweep_row> sweep_mode_volume(
    const emitter_model &m, double roc_um, double lambda0_nm,
    const mirror_budget &b, double eta_e, double eta_theta, double eta_lambda,
    double q_em, const std::vector<double> &d_eff_um) {
    check_emitter(m);
    check_budget(b);
    require(q_em > 0.0, "emitter quality must be positive");
    double omega_c = omega_from_lambda_nm(lambda0_nm);
    std::vector<volume_sweep_row> rows;
    rows.reserve(d_eff_um.size());
    for (double d : d_eff_um) {
        volume_sweep_row row;
        row.d_eff_um = d;
        if (!(d > 0.0) || d >= roc_um) {
            row.v_um3 = row.c_effective = row.c_rate =
                std::numeric_limits<double>::quiet_NaN();
            row.ok = false;
            rows.push_back(row);
            continue;
        }
        cavity_geometry g{d, roc_um, lambda0_nm};
        row.v_um3 = mode_volume_um3(g);
        row.c_effective = effective_purcell(lambda0_nm, q_em, row.v_um3,
                                            eta_lambda, eta_e * eta_theta);
        double kap = decay_rate_rad_s(d, b);
        row.c_rate = emission_rate_rad_s(m, row.v_um3, eta_e, eta_theta,
                                         omega_c, {}, kap) /
                     m.gamma0_rad_s;
        row.ok = true;
        rows.push_back(row);
    }
    return rows;
}

strong_coupling_report strong_coupling(double wavelength_nm, double d_eff_um,
                                       double roc_um, const mirror_budget &b,
                                       double zeta0, double eta_e,
                                       double gamma0_rad_s,
                                       double dephasing_rad_s) {
    require(dephasing_rad_s >= 0.0, "dephasing must be >= 0");
    cavity_geometry g{d_eff_um, roc_um, wavelength_nm};
    check_geometry(g);
    strong_coupling_report rep;
    rep.finesse = finesse(b);
    rep.kappa_rad_s = decay_rate_rad_s(d_eff_um, b);
    double v = mode_volume_um3(g);
    double omega = omega_from_lambda_nm(wavelength_nm);
    rep.g00_rad_s =
        coupling_rate_rad_s(omega, zeta0, v, eta_e, gamma0_rad_s, 1.0);
    double gamma_total = rep.kappa_rad_s + gamma0_rad_s + dephasing_rad_s;
    rep.c_rate = 4.0 * rep.g00_rad_s * rep.g00_rad_s /
                 (gamma_total * gamma0_rad_s);
    double g2 = 2.0 * rep.g00_rad_s;
    rep.strong = g2 > rep.kappa_rad_s && g2 > gamma0_rad_s &&
                 g2 > dephasing_rad_s;
    return rep;
}

} // namespace cavsim
