#include "stack.hpp"

#include <cmath>

#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

void check_stack(const layer_stack &s) {
    require(s.ambient >= 1.0 && s.substrate >= 1.0, "ambient/substrate index must be >= 1");
    for (const layer &l : s.layers) {
        require(l.index >= 1.0, "layer index must be >= 1");
        require(l.thickness_nm > 0.0 && std::isfinite(l.thickness_nm),
                "layer thickness must be positive and finite");
    }
}

layer_stack quarter_wave_stack(double center_wavelength_nm, double n_high,
                               double n_low, int pairs, double substrate_index,
                               bool terminate_low_quarter) {
    require(center_wavelength_nm > 0.0, "center wavelength must be positive");
    require(pairs >= 1, "at least one layer pair required");
    require(n_high > n_low && n_low >= 1.0, "need n_high > n_low >= 1");
    require(substrate_index >= 1.0, "substrate index must be >= 1");
    layer_stack s;
    s.ambient = 1.0;
    s.substrate = substrate_index;
    layer high{n_high, center_wavelength_nm / (4.0 * n_high)};
    layer low{n_low, center_wavelength_nm / (4.0 * n_low)};
    if (terminate_low_quarter) s.layers.push_back(low);  // ambient side
    for (int i = 0; i < pairs; ++i) {
        s.layers.push_back(high);
        s.layers.push_back(low);
    }
    return s;
}

stack_amplitudes amplitudes_at(const layer_stack &s, double wavelength_nm) {
    require(wavelength_nm > 0.0, "wavelength must be positive");
    using cd = std::complex<double>;
    // characteristic-matrix product, normal incidence
    cd a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
    for (const layer &l : s.layers) {
        double delta = 2.0 * pi * l.index * l.thickness_nm / wavelength_nm;
        cd cs{std::cos(delta), 0.0};
        cd isn{0.0, std::sin(delta)};
        cd m01 = isn / l.index, m10 = isn * l.index;
        cd a2 = a * cs + b * m10, b2 = a * m01 + b * cs;
        cd c2 = c * cs + d * m10, d2 = c * m01 + d * cs;
        a = a2; b = b2; c = c2; d = d2;
    }
    double na = s.ambient, ns = s.substrate;
    cd denom = na * a + na * ns * b + c + ns * d;
    stack_amplitudes out;
    out.r = (na * a + na * ns * b - c - ns * d) / denom;
    out.t = 2.0 * na / denom;
    return out;
}

stack_response response_at(const layer_stack &s, double wavelength_nm) {
    stack_amplitudes amp = amplitudes_at(s, wavelength_nm);
    stack_response out;
    out.reflectance = std::norm(amp.r);
    out.transmittance = (s.substrate / s.ambient) * std::norm(amp.t);
    out.phase_rad = std::arg(amp.r);
    return out;
}

void transmission_spectrum(const layer_stack &s, double lambda_min_nm,
                           double lambda_max_nm, std::size_t samples,
                           double *wavelengths_nm, double *transmittance) {
    require(lambda_min_nm > 0.0 && lambda_min_nm < lambda_max_nm,
            "need 0 < lambda_min < lambda_max");
    require(samples >= 2, "need at least 2 samples");
    double step = (lambda_max_nm - lambda_min_nm) / double(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        double lam = lambda_min_nm + step * double(i);
        wavelengths_nm[i] = lam;
        transmittance[i] = response_at(s, lam).transmittance;
    }
}

double penetration_depth_um(const layer_stack &s, double wavelength_nm,
                            bool *in_stop_band) {
    require(wavelength_nm > 0.0, "wavelength must be positive");
    double h = wavelength_nm * 1e-4;
    double p_hi = std::arg(amplitudes_at(s, wavelength_nm + h).r);
    double p_lo = std::arg(amplitudes_at(s, wavelength_nm - h).r);
    double dphi = std::remainder(p_hi - p_lo, 2.0 * pi);  // avoid branch jumps
    double pen_nm = wavelength_nm * wavelength_nm / (4.0 * pi) * dphi / (2.0 * h);
    if (in_stop_band)
        *in_stop_band = response_at(s, wavelength_nm).transmittance < 1e-2;
    return pen_nm * 1e-3;
}

double field_factor(const layer_stack &s, double wavelength_nm,
                    double emitter_height_nm) {
    require(emitter_height_nm >= 0.0, "emitter height must be >= 0");
    stack_amplitudes amp = amplitudes_at(s, wavelength_nm);
    double k = 2.0 * pi / wavelength_nm;
    std::complex<double> phase{0.0, 2.0 * k * emitter_height_nm};
    double num = std::norm(1.0 + amp.r * std::exp(phase));
    double den = (1.0 + std::abs(amp.r)) * (1.0 + std::abs(amp.r));
    return num / den;
}

} // namespace cavsim
