#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "core/emitter.hpp"
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

std::vector<double> comb_of(const emitter_model &m) {
    std::vector<double> w;
    for (const transition &t : m.transitions) w.push_back(t.omega_rad_s);
    return w;
}

} // namespace

TEST_CASE("branching weights of the displaced oscillator") {
    std::vector<double> w = franck_condon(3.2, 20);
    REQUIRE(w.size() == 21);
    CHECK(w[0] == doctest::Approx(0.0407622).epsilon(1e-4));
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);

    std::vector<double> w0 = franck_condon(0.0, 4);
    CHECK(w0[0] == doctest::Approx(1.0));
    CHECK(w0[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(franck_condon(-0.1, 4), validation_error);
}

TEST_CASE("built-in six-line catalog") {
    emitter_model m = nv_default_model();
    REQUIRE(m.transitions.size() == 6);
    double sum = 0.0;
    for (const transition &t : m.transitions) sum += t.weight;
    CHECK(sum == doctest::Approx(1.02).epsilon(1e-12));  // stored verbatim
    CHECK(m.gamma0_rad_s == doctest::Approx(2 * pi * 8e6));
    CHECK(m.transitions[0].omega_rad_s == doctest::Approx(2 * pi * 470e12));
    CHECK(m.transitions[2].weight == doctest::Approx(0.44));
    CHECK(m.transitions[2].dephasing_rad_s == doctest::Approx(2 * pi * 25e12));

    normalize_weights(m);
    sum = 0.0;
    for (const transition &t : m.transitions) sum += t.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.transitions[2].weight == doctest::Approx(0.44 / 1.02).epsilon(1e-12));
}

TEST_CASE("catalog validation") {
    emitter_model m = nv_default_model();
    m.transitions[3].omega_rad_s = m.transitions[0].omega_rad_s + 1.0;
    CHECK_THROWS_AS(check_emitter(m), validation_error);  // must decrease
    emitter_model w = nv_default_model();
    w.transitions[0].weight = 1.2;
    CHECK_THROWS_AS(check_emitter(w), validation_error);
    emitter_model g = nv_default_model();
    g.gamma0_rad_s = 0.0;
    CHECK_THROWS_AS(check_emitter(g), validation_error);
}

TEST_CASE("single line peaks at two over pi gamma") {
    emitter_model m;
    m.gamma0_rad_s = 2 * pi * 8e6;
    double gs = 2 * pi * 25e12;
    double w0 = 2 * pi * 430e12;
    m.transitions.push_back({w0, 1.0, gs});
    CHECK(spectral_density_omega(m, w0) == doctest::Approx(2.0 / (pi * gs)).epsilon(1e-12));
}

TEST_CASE("summed spectrum shape") {
    emitter_model m = nv_default_model();
    std::vector<double> grid = linspace(590.0, 850.0, 5201);
    std::vector<double> s(grid.size());
    spectrum_lambda(m, grid.data(), grid.size(), s.data());

    std::size_t ipk = std::max_element(s.begin(), s.end()) - s.begin();
    double peak = grid[ipk];
    CHECK(peak == doctest::Approx(683.15).epsilon(1e-3));
    CHECK(std::abs(peak - 690.0) < 15.0);

    double half = s[ipk] / 2;
    std::size_t il = ipk, ir = ipk;
    while (il > 0 && s[il] > half) --il;
    while (ir + 1 < s.size() && s[ir] > half) ++ir;
    double fwhm = grid[ir] - grid[il];
    CHECK(fwhm == doctest::Approx(72.45).epsilon(0.02));
    CHECK(std::abs(fwhm - 70.0) < 15.0);
}

TEST_CASE("spectrum area approaches the weight sum on a wide grid") {
    emitter_model m = nv_default_model();
    std::vector<double> grid = linspace(300.0, 3000.0, 270001);
    std::vector<double> s(grid.size());
    spectrum_lambda(m, grid.data(), grid.size(), s.data());
    double area = trapezoid(grid.data(), s.data(), grid.size());
    double wsum = 1.02;
    CHECK(std::abs(area - wsum) / wsum < 0.02);
    CHECK(area == doctest::Approx(1.0001).epsilon(2e-3));
}

TEST_CASE("relative spectral density at the cavity wavelength") {
    emitter_model m = nv_default_model();
    std::vector<double> grid = linspace(590.0, 850.0, 5201);
    std::vector<double> s(grid.size());
    spectrum_lambda(m, grid.data(), grid.size(), s.data());

    CHECK(spectral_detuning(grid.data(), s.data(), grid.size(), 710.0) ==
          doctest::Approx(0.6307).epsilon(0.016));
    CHECK(spectral_detuning(grid.data(), s.data(), grid.size(), 683.15) ==
          doctest::Approx(1.0).epsilon(1e-9));
    double tail = spectral_detuning(grid.data(), s.data(), grid.size(), 590.0);
    CHECK(tail < 0.1);
    CHECK(tail == doctest::Approx(0.0688).epsilon(0.05));

    CHECK_THROWS_AS(spectral_detuning(grid.data(), s.data(), grid.size(), 100.0),
                    validation_error);
    std::vector<double> zero(grid.size(), 0.0);
    CHECK_THROWS_AS(spectral_detuning(grid.data(), zero.data(), grid.size(), 710.0),
                    validation_error);
}

TEST_CASE("narrow instrument response barely distorts the broad spectrum") {
    emitter_model m = nv_default_model();
    std::vector<double> grid = linspace(590.0, 850.0, 2601);
    std::vector<double> s(grid.size()), c(grid.size());
    spectrum_lambda(m, grid.data(), grid.size(), s.data());
    convolve_gaussian(grid.data(), s.data(), grid.size(), 0.1, c.data());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(c[i] - s[i]) / s[i]);
    CHECK(worst < 0.01);
    // a broad response flattens the peak
    convolve_gaussian(grid.data(), s.data(), grid.size(), 40.0, c.data());
    CHECK(*std::max_element(c.begin(), c.end()) <
          *std::max_element(s.begin(), s.end()));
}

TEST_CASE("model fit recovers the truth without noise") {
    emitter_model truth = nv_default_model();
    std::vector<double> grid = linspace(590.0, 850.0, 1041);
    std::vector<double> s(grid.size());
    spectrum_lambda(truth, grid.data(), grid.size(), s.data());

    emitter_fit_result fit = fit_emitter(grid.data(), s.data(), grid.size(),
                                         comb_of(truth), truth.gamma0_rad_s);
    CHECK(fit.converged);
    CHECK(fit.rms_rel < 1e-6);
    REQUIRE(fit.model.transitions.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(std::abs(fit.model.transitions[k].weight -
                       truth.transitions[k].weight) < 1e-4);
        CHECK(std::abs(fit.model.transitions[k].dephasing_rad_s /
                           truth.transitions[k].dephasing_rad_s -
                       1.0) < 1e-3);
    }
}

TEST_CASE("model fit tolerates one-percent noise") {
    emitter_model truth = nv_default_model();
    std::vector<double> grid = linspace(590.0, 850.0, 1041);
    std::vector<double> s(grid.size());
    spectrum_lambda(truth, grid.data(), grid.size(), s.data());

    for (unsigned seed = 0; seed < 3; ++seed) {
        std::mt19937_64 rng(2000 + seed);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::vector<double> noisy(s);
        for (double &v : noisy) v *= 1.0 + 0.01 * n01(rng);
        emitter_fit_result fit = fit_emitter(grid.data(), noisy.data(),
                                             grid.size(), comb_of(truth),
                                             truth.gamma0_rad_s);
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(std::abs(fit.model.transitions[k].weight -
                           truth.transitions[k].weight) < 0.03);
            CHECK(std::abs(fit.model.transitions[k].dephasing_rad_s /
                               truth.transitions[k].dephasing_rad_s -
                           1.0) < 0.15);
        }
    }
}

TEST_CASE("single-line fit is exact") {
    emitter_model truth;
    truth.gamma0_rad_s = 2 * pi * 8e6;
    truth.transitions.push_back({2 * pi * 430e12, 0.3, 2 * pi * 10e12});
    std::vector<double> grid = linspace(600.0, 800.0, 801);
    std::vector<double> s(grid.size());
    spectrum_lambda(truth, grid.data(), grid.size(), s.data());

    emitter_fit_result fit = fit_emitter(grid.data(), s.data(), grid.size(),
                                         {2 * pi * 430e12}, truth.gamma0_rad_s);
    CHECK(fit.converged);
    CHECK(fit.model.transitions[0].weight == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(fit.model.transitions[0].dephasing_rad_s ==
          doctest::Approx(2 * pi * 10e12).epsilon(1e-6));
}

TEST_CASE("fit input validation") {
    std::vector<double> grid = linspace(600.0, 800.0, 15);
    std::vector<double> s(grid.size(), 1.0);
    CHECK_THROWS_AS(
        fit_emitter(grid.data(), s.data(), grid.size(), {2 * pi * 430e12}, 1.0),
        validation_error);  // too few samples per parameter
    std::vector<double> grid2 = linspace(600.0, 800.0, 801);
    std::vector<double> zero(grid2.size(), 0.0);
    CHECK_THROWS_AS(fit_emitter(grid2.data(), zero.data(), grid2.size(),
                                {2 * pi * 430e12}, 1.0),
                    validation_error);
}
