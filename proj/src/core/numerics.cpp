#include "numerics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace cavsim {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)> &f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)> &f, double a, double b,
                 double tol) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, b, fa, fm, fb, whole, tol, 48);
}

double trapezoid(const double *x, const double *y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}

double lerp_at(const double *x, const double *y, std::size_t n, double x0) {
    require(n >= 1, "empty grid");
    require(x0 >= x[0] && x0 <= x[n - 1], "interpolation point outside grid");
    const double *it = std::lower_bound(x, x + n, x0);
    if (it == x) return y[0];
    std::size_t i = static_cast<std::size_t>(it - x);
    double t = (x0 - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

double trapezoid_band(const double *x, const double *y, std::size_t n,
                      double lo, double hi) {
    require(n >= 2, "grid too short");
    require(lo < hi, "empty band");
    lo = std::max(lo, x[0]);
    hi = std::min(hi, x[n - 1]);
    if (lo >= hi) return 0.0;
    double ylo = lerp_at(x, y, n, lo), yhi = lerp_at(x, y, n, hi);
    double acc = 0.0;
    double px = lo, py = ylo;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= lo) continue;
        if (x[i] >= hi) break;
        acc += 0.5 * (y[i] + py) * (x[i] - px);
        px = x[i];
        py = y[i];
    }
    acc += 0.5 * (yhi + py) * (hi - px);
    return acc;
}

double golden_min(const std::function<double(double)> &f, double a, double b,
                 int iters) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

bool strictly_increasing(const double *x, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) return false;
    return true;
}

} // namespace cavsim
