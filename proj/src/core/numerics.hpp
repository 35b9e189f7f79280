#pragma once

#include <cstddef>
#include <functional>

namespace cavsim {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c_m_s = 2.99792458e8;    // vacuum light speed
inline constexpr double c_nm_s = 2.99792458e17;  // same, nm/s

inline double omega_from_lambda_nm(double lambda_nm) {
    return 2.0 * pi * c_nm_s / lambda_nm;
}

// adaptive Simpson, absolute tolerance
double integrate(const std::function<double(double)> &f, double a, double b,
                 double tol = 1e-9);

// trapezoid over (x, y); x strictly increasing
double trapezoid(const double *x, const double *y, std::size_t n);

// trapezoid restricted to [lo, hi]; end intervals cut by interpolation
double trapezoid_band(const double *x, const double *y, std::size_t n,
                      double lo, double hi);

// piecewise-linear value at x0; x strictly increasing, x0 inside [x0_, xN]
double lerp_at(const double *x, const double *y, std::size_t n, double x0);

// minimize f on [a, b] by golden section; returns argmin
double golden_min(const std::function<double(double)> &f, double a, double b,
                  int iters = 80);

bool strictly_increasing(const double *x, std::size_t n);

} // namespace cavsim
