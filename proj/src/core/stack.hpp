#pragma once

#include <complex>
#include <vector>

namespace cavsim {

struct layer {
    double index;         // real refractive index, >= 1
    double thickness_nm;  // physical thickness, > 0
};

// light enters from ambient; layers[0] is hit first
struct layer_stack {
    double ambient = 1.0;
    double substrate = 1.0;
    std::vector<layer> layers;
};

struct stack_response {
    double reflectance;
    double transmittance;
    double phase_rad;  // phase of the reflected amplitude, (-pi, pi]
};

struct stack_amplitudes {
    std::complex<double> r, t;
};

void check_stack(const layer_stack &s);

layer_stack quarter_wave_stack(double center_wavelength_nm, double n_high,
                               double n_low, int pairs, double substrate_index,
                               bool terminate_low_quarter);

stack_amplitudes amplitudes_at(const layer_stack &s, double wavelength_nm);
stack_response response_at(const layer_stack &s, double wavelength_nm);

void transmission_spectrum(const layer_stack &s, double lambda_min_nm,
                           double lambda_max_nm, std::size_t samples,
                           double *wavelengths_nm, double *transmittance);

// equivalent free-space length from the reflection-phase dispersion; positive
// inside the stop band. in_stop_band reports whether local T < 1e-2.
double penetration_depth_um(const layer_stack &s, double wavelength_nm,
                            bool *in_stop_band = nullptr);

// squared standing-wave field at a height above the outer surface, relative to
// an antinode
double field_factor(const layer_stack &s, double wavelength_nm,
                    double emitter_height_nm);

} // namespace cavsim
