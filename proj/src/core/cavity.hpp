#pragma once

namespace cavsim {

// plane-concave geometry; d_eff includes mirror penetration
struct cavity_geometry {
    double d_eff_um;
    double roc_um;
    double wavelength_nm;
};

// per-mirror power budget, absolute fractions; mirror 2 is the outcoupler
struct mirror_budget {
    double t1, l1, t2, l2;
};

void check_geometry(const cavity_geometry &g);
void check_budget(const mirror_budget &b);

double effective_length_um(double lambda1_nm, double lambda2_nm);
double transverse_mode_spacing_nm(const cavity_geometry &g);
double roc_from_splitting_um(double spacing_nm, double wavelength_nm,
                             double d_eff_um);
double mode_waist_um(const cavity_geometry &g);
double mode_volume_um3(const cavity_geometry &g);
double finesse(const mirror_budget &b);
double linewidth_nm(double lambda0_nm, double d_eff_um, const mirror_budget &b);
double quality_factor(double lambda0_nm, double linewidth_nm_);
double decay_rate_rad_s(double d_eff_um, const mirror_budget &b);
double outcoupling(const mirror_budget &b);

// paraxial-validity guard used for sweep warnings
bool paraxial_ok(const cavity_geometry &g);

} // namespace cavsim
