#pragma once

#include <cstddef>
#include <vector>

#include "cavity.hpp"
#include "emitter.hpp"

namespace cavsim {

double ideal_purcell(double lambda_nm, double q, double v_um3,
                     double field_factor);
double effective_purcell(double lambda0_nm, double q_em, double v_um3,
                         double eta_lambda, double field_factor);

// dipole-orientation average for [111]-aligned ensembles; the saturated flag
// selects the isotropic pumping limit
double orientation_factor(bool saturated);
// normalization integral of the below-saturation angle distribution (= 1)
double orientation_norm();

// single-emitter, single-transition coupling rate; cos_factor carries either
// cos(theta) or sqrt(eta_theta)
double coupling_rate_rad_s(double omega_rad_s, double weight, double v_um3,
                           double eta_e, double gamma0_rad_s,
                           double cos_factor);

// summed emission rate into one cavity mode at omega_c; kappa per transition
// (empty -> kappa_scalar everywhere)
double emission_rate_rad_s(const emitter_model &m, double v_um3, double eta_e,
                           double eta_theta, double omega_c_rad_s,
                           const std::vector<double> &kappa_per_transition,
                           double kappa_scalar);

double collective_alpha(double n_emitters, double g0_rad_s, double kappa_rad_s,
                        double dephasing_rad_s);

struct volume_sweep_row {
    double d_eff_um;
    double v_um3;
    double c_effective;  // broadband emitter-quality form
    double c_rate;       // dissipative rate model
    bool ok;             // false for unstable geometries (values NaN)
};

std::vector<volume_sweep_row> sweep_mode_volume(
    const emitter_model &m, double roc_um, double lambda0_nm,
    const mirror_budget &b, double eta_e, double eta_theta, double eta_lambda,
    double q_em, const std::vector<double> &d_eff_um);

struct strong_coupling_report {
    double finesse;
    double kappa_rad_s;
    double g00_rad_s;
    double c_rate;
    bool strong;  // 2 g00 beats kappa, gamma0 and the dephasing rate
};

strong_coupling_report strong_coupling(double wavelength_nm, double d_eff_um,
                                       double roc_um, const mirror_budget &b,
                                       double zeta0, double eta_e,
                                       double gamma0_rad_s,
                                       double dephasing_rad_s);

} // namespace cavsim
