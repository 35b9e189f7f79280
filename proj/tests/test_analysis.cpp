#include <cmath>
#include <random>
#include <vector>

#include "core/analysis.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = a + (b - a) * double(i) / double(n - 1);
    return x;
}

double lorentz(double x, double x0, double fwhm) {
    return (fwhm / (2 * pi)) / ((x - x0) * (x - x0) + fwhm * fwhm / 4);
}

} // namespace

TEST_CASE("background subtraction with clamping") {
    std::vector<double> wl = linspace(600.0, 800.0, 201);
    std::vector<double> bgw = linspace(590.0, 810.0, 23);
    std::vector<double> bg(bgw.size()), raw(wl.size()), out(wl.size());
    for (std::size_t i = 0; i < bgw.size(); ++i) bg[i] = 5.0 + 0.01 * bgw[i];
    for (std::size_t i = 0; i < wl.size(); ++i)
        raw[i] = 5.0 + 0.01 * wl[i] + (i % 3 == 0 ? 2.0 : 0.001);

    std::size_t clamped = 999;
    background_correct(wl.data(), raw.data(), wl.size(), bgw.data(), bg.data(),
                       bgw.size(), out.data(), &clamped);
    CHECK(clamped == 0);
    for (std::size_t i = 0; i < wl.size(); ++i)
        CHECK(out[i] == doctest::Approx(i % 3 == 0 ? 2.0 : 0.001).epsilon(1e-6));

    // dips below the background clamp to zero and are counted
    raw[10] = 0.0;
    raw[20] = 0.0;
    background_correct(wl.data(), raw.data(), wl.size(), bgw.data(), bg.data(),
                       bgw.size(), out.data(), &clamped);
    CHECK(clamped == 2);
    CHECK(out[10] == 0.0);

    // background covering less than half the data range is rejected
    std::vector<double> shortw = linspace(600.0, 690.0, 10);
    std::vector<double> shortb(shortw.size(), 5.0);
    CHECK_THROWS_AS(background_correct(wl.data(), raw.data(), wl.size(),
                                       shortw.data(), shortb.data(),
                                       shortw.size(), out.data(), nullptr),
                    validation_error);
}

TEST_CASE("scale factor between filtered spectra") {
    std::vector<double> wl = linspace(590.0, 770.0, 361);
    std::vector<double> t2(wl.size()), s0(wl.size()), sm(wl.size());
    for (std::size_t i = 0; i < wl.size(); ++i) {
        t2[i] = 1e-3 * (1.0 + 0.5 * std::sin(wl[i] / 17.0));
        s0[i] = 2.0 + std::cos(wl[i] / 40.0);
        sm[i] = 2.5 * t2[i] * s0[i];
    }
    double rms = 1.0;
    double b = fit_scale_factor(wl.data(), sm.data(), t2.data(), s0.data(),
                                wl.size(), 590.0, 690.0, &rms);
    CHECK(b == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rms < 1e-12);

    // five percent multiplicative noise moves b by less than five percent
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> noisy(sm);
    for (double &v : noisy) v *= 1.0 + 0.05 * n01(rng);
    double bn = fit_scale_factor(wl.data(), noisy.data(), t2.data(), s0.data(),
                                 wl.size(), 590.0, 690.0, nullptr);
    CHECK(std::abs(bn / 2.5 - 1.0) < 0.05);

    // window sensitivity: a different window still lands near the same factor
    double b2 = fit_scale_factor(wl.data(), sm.data(), t2.data(), s0.data(),
                                 wl.size(), 620.0, 720.0, nullptr);
    CHECK(b2 == doctest::Approx(b).epsilon(1e-9));

    CHECK_THROWS_AS(fit_scale_factor(wl.data(), sm.data(), t2.data(), s0.data(),
                                     wl.size(), 900.0, 950.0, nullptr),
                    validation_error);
    std::vector<double> zero(wl.size(), 0.0);
    CHECK_THROWS_AS(fit_scale_factor(wl.data(), sm.data(), t2.data(),
                                     zero.data(), wl.size(), 590.0, 690.0,
                                     nullptr),
                    validation_error);
}

TEST_CASE("resonance window integral and correction") {
    double l0 = 710.0, fwhm = 0.0225;
    std::vector<double> wl = linspace(709.5, 710.5, 5001);
    std::vector<double> v(wl.size());
    for (std::size_t i = 0; i < wl.size(); ++i) v[i] = lorentz(wl[i], l0, fwhm);

    resonance_peak r = integrate_resonance(wl.data(), v.data(), wl.size(), l0,
                                           fwhm, 3.0);
    CHECK(r.window_fraction == doctest::Approx(2.0 / pi * std::atan(3.0)).epsilon(1e-12));
    CHECK(r.window_fraction == doctest::Approx(0.795167).epsilon(1e-5));
    CHECK(r.power == doctest::Approx(r.window_fraction).epsilon(1e-3));
    CHECK(r.power_corrected == doctest::Approx(1.0).epsilon(1e-3));

    // peak density round trip against the analytic Lorentzian peak
    double smax = peak_spectral_density(r.power_corrected, fwhm);
    CHECK(smax == doctest::Approx(2.0 / (pi * fwhm)).epsilon(1e-3));

    // window running off the sampled grid is an error
    CHECK_THROWS_AS(integrate_resonance(wl.data(), v.data(), wl.size(), l0, 1.0,
                                        3.0),
                    validation_error);

    // a window narrower than the grid spacing still integrates
    std::vector<double> coarse = linspace(709.5, 710.5, 11);
    std::vector<double> cv(coarse.size(), 1.0);
    resonance_peak sub = integrate_resonance(coarse.data(), cv.data(),
                                             coarse.size(), l0, 0.02, 3.0);
    CHECK(sub.power == doctest::Approx(0.06).epsilon(1e-9));
}

TEST_CASE("band integral clips to the sampled grid") {
    std::vector<double> wl = linspace(590.0, 850.0, 1301);
    std::vector<double> v(wl.size());
    for (std::size_t i = 0; i < wl.size(); ++i) v[i] = 1.0 + wl[i] / 1000.0;
    double full = trapezoid(wl.data(), v.data(), wl.size());
    CHECK(integrate_band(wl.data(), v.data(), wl.size(), 500.0, 2000.0) ==
          doctest::Approx(full).epsilon(1e-12));
    double part = integrate_band(wl.data(), v.data(), wl.size(), 600.0, 700.0);
    CHECK(part == doctest::Approx(100.0 * (1.0 + 0.65)).epsilon(1e-9));
}

TEST_CASE("measured enhancement ratios") {
    CHECK(experimental_purcell(2.0, 10.0, 0.05, 0.5) ==
          doctest::Approx(0.02).epsilon(1e-12));
    CHECK(experimental_ideal_purcell(40.0, 2.0, 0.05, 0.5) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(experimental_purcell(2.0, 0.0, 0.05, 0.5), validation_error);
    CHECK_THROWS_AS(experimental_purcell(2.0, 10.0, 0.0, 0.5), validation_error);
    CHECK_THROWS_AS(peak_spectral_density(1.0, 0.0), validation_error);
}

TEST_CASE("saturation fit on clean data") {
    double p_inf = 1e5, i_sat = 3.5;
    double a = p_inf / (8 * i_sat);  // 20% of the saturated count at the knee
    std::vector<double> ivals{0.2, 0.45, 0.8, 1.2, 1.8, 2.6, 3.5, 5, 7, 10, 14, 20};
    std::vector<double> p(ivals.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = p_inf * ivals[i] / (i_sat + ivals[i]) + a * ivals[i];

    saturation_fit f = fit_saturation(ivals.data(), p.data(), ivals.size());
    CHECK(f.identified);
    CHECK(f.i_sat == doctest::Approx(i_sat).epsilon(1e-6));
    CHECK(f.p_inf == doctest::Approx(p_inf).epsilon(1e-6));
    CHECK(f.a == doctest::Approx(a).epsilon(1e-4));
    CHECK(f.rms_rel < 1e-6);

    // no background: the linear slope comes back at zero
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = p_inf * ivals[i] / (i_sat + ivals[i]);
    f = fit_saturation(ivals.data(), p.data(), ivals.size());
    CHECK(f.i_sat == doctest::Approx(i_sat).epsilon(1e-6));
    CHECK(std::abs(f.a) * 20.0 / p_inf < 1e-6);
}

TEST_CASE("saturation fit under noise") {
    double p_inf = 1e5, i_sat = 3.5;
    double a = p_inf / (8 * i_sat);
    std::vector<double> ivals(25);
    for (std::size_t i = 0; i < ivals.size(); ++i)
        ivals[i] = 0.1 * std::pow(35.0 / 0.1, double(i) / double(ivals.size() - 1));
    for (unsigned seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(500 + seed);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::vector<double> p(ivals.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            double clean = p_inf * ivals[i] / (i_sat + ivals[i]) + a * ivals[i];
            p[i] = clean * (1.0 + 0.02 * n01(rng));
        }
        saturation_fit f = fit_saturation(ivals.data(), p.data(), ivals.size());
        CHECK(f.identified);
        CHECK(std::abs(f.i_sat / i_sat - 1.0) < 0.15);
    }
}

TEST_CASE("straight-line data has no saturation knee") {
    std::vector<double> ivals{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> p(ivals.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 3000.0 * ivals[i];
    saturation_fit f = fit_saturation(ivals.data(), p.data(), ivals.size());
    CHECK_FALSE(f.identified);

    CHECK_THROWS_AS(fit_saturation(ivals.data(), p.data(), 3), validation_error);
}

TEST_CASE("gaussian-beam peak intensity") {
    CHECK(intensity_from_power_gw_m2(12.370e-3, 1.5) ==
          doctest::Approx(3.5).epsilon(1e-3));
    CHECK(intensity_from_power_gw_m2(1.0, 1.0) ==
          doctest::Approx(636.6198).epsilon(1e-6));
    CHECK_THROWS_AS(intensity_from_power_gw_m2(1.0, 0.0), validation_error);
}
