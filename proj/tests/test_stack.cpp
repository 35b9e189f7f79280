#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/stack.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

layer_stack fiber_mirror() { return quarter_wave_stack(780.0, 2.10, 1.46, 18, 1.46, false); }
layer_stack macro_mirror() { return quarter_wave_stack(780.0, 2.10, 1.46, 17, 1.46, true); }

} // namespace

TEST_CASE("quarter-wave builder layer bookkeeping") {
    layer_stack s = quarter_wave_stack(780.0, 2.10, 1.46, 1, 1.46, false);
    REQUIRE(s.layers.size() == 2);
    CHECK(s.layers[0].index == doctest::Approx(2.10));
    CHECK(s.layers[0].thickness_nm == doctest::Approx(92.857).epsilon(1e-4));
    CHECK(s.layers[1].index == doctest::Approx(1.46));
    CHECK(s.layers[1].thickness_nm == doctest::Approx(133.562).epsilon(1e-4));
    CHECK(s.substrate == doctest::Approx(1.46));

    layer_stack t = quarter_wave_stack(780.0, 2.10, 1.46, 1, 1.46, true);
    REQUIRE(t.layers.size() == 3);
    // termination goes on the ambient side
    CHECK(t.layers[0].index == doctest::Approx(1.46));
    CHECK(t.layers[0].thickness_nm == doctest::Approx(133.562).epsilon(1e-4));
    CHECK(t.layers[1].index == doctest::Approx(2.10));

    CHECK_THROWS_AS(quarter_wave_stack(780.0, 2.10, 1.46, -1, 1.46, false),
                    validation_error);
    CHECK_THROWS_AS(quarter_wave_stack(-5.0, 2.10, 1.46, 3, 1.46, false),
                    validation_error);
}

TEST_CASE("bare interface reduces to Fresnel") {
    layer_stack s;
    s.substrate = 1.46;
    stack_response r = response_at(s, 700.0);
    double rf = (1.0 - 1.46) / (1.0 + 1.46);
    CHECK(r.reflectance == doctest::Approx(rf * rf).epsilon(1e-12));
    CHECK(r.reflectance == doctest::Approx(0.0350).epsilon(2e-3));
    CHECK(r.reflectance + r.transmittance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("odd quarter-wave stack matches the admittance closed form") {
    const double nH = 2.10, nL = 1.46, ns = 1.46, lam = 780.0;
    for (int N = 1; N <= 20; ++N) {
        layer_stack s;
        s.substrate = ns;
        for (int k = 0; k < N; ++k) {
            s.layers.push_back({nH, lam / (4 * nH)});
            s.layers.push_back({nL, lam / (4 * nL)});
        }
        s.layers.push_back({nH, lam / (4 * nH)});
        double y = std::pow(nH / nL, 2.0 * N) * nH * nH / ns;
        double rexp = (1.0 - y) / (1.0 + y);
        CHECK(response_at(s, lam).reflectance ==
              doctest::Approx(rexp * rexp).epsilon(1e-8));
    }
}

TEST_CASE("lossless stacks conserve power and are reciprocal") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> index(1.2, 2.4);
    std::uniform_real_distribution<double> thick(30.0, 400.0);
    std::uniform_real_distribution<double> wl(500.0, 1000.0);
    for (int trial = 0; trial < 200; ++trial) {
        layer_stack s;
        s.substrate = index(rng);
        int m = count(rng);
        for (int i = 0; i < m; ++i) s.layers.push_back({index(rng), thick(rng)});
        double lam = wl(rng);
        stack_response f = response_at(s, lam);
        CHECK(std::abs(f.reflectance + f.transmittance - 1.0) < 1e-10);

        layer_stack rev;
        rev.ambient = s.substrate;
        rev.substrate = s.ambient;
        rev.layers.assign(s.layers.rbegin(), s.layers.rend());
        stack_response b = response_at(rev, lam);
        CHECK(std::abs(f.transmittance - b.transmittance) < 1e-10);
    }
}

TEST_CASE("mirror transmissions at the working wavelength") {
    layer_stack f = fiber_mirror(), m = macro_mirror();
    double tf = response_at(f, 710.0).transmittance;
    double tm = response_at(m, 710.0).transmittance;
    CHECK(tf == doctest::Approx(938e-6).epsilon(0.01));
    CHECK(tm == doctest::Approx(1946e-6).epsilon(0.01));
    // design targets: 810 ppm and 1900 ppm, both within 20%
    CHECK(tf > 810e-6 * 0.8);
    CHECK(tf < 810e-6 * 1.2);
    CHECK(tm > 1900e-6 * 0.8);
    CHECK(tm < 1900e-6 * 1.2);
    // high reflectance at design center
    CHECK(response_at(f, 780.0).reflectance > 0.9999);
    // transmissive window below the band edge
    CHECK(response_at(f, 650.0).transmittance > 0.3);
}

TEST_CASE("penetration depth is positive inside the stop band") {
    layer_stack f = fiber_mirror(), m = macro_mirror();
    bool in_band = false;
    double pf = penetration_depth_um(f, 780.0, &in_band);
    CHECK(in_band);
    CHECK(pf == doctest::Approx(0.305).epsilon(0.02));
    double pm = penetration_depth_um(m, 780.0, &in_band);
    CHECK(in_band);
    CHECK(pm == doctest::Approx(0.934).epsilon(0.02));
    double both = penetration_depth_um(f, 735.0) + penetration_depth_um(m, 735.0);
    CHECK(both == doctest::Approx(1.342).epsilon(0.02));
    CHECK(both > 1.0);
    CHECK(both < 2.0);
    // outside the band the number is not a penetration; the flag says so
    penetration_depth_um(f, 600.0, &in_band);
    CHECK_FALSE(in_band);
}

TEST_CASE("surface field factor") {
    layer_stack m = macro_mirror();
    // low-index termination pulls the antinode onto the surface at center
    CHECK(field_factor(m, 780.0, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    // detuned to the working wavelength the surface sits below the antinode
    double e710 = field_factor(m, 710.0, 0.0);
    CHECK(e710 == doctest::Approx(0.509).epsilon(0.02));
    CHECK(e710 > 0.45);
    CHECK(e710 < 0.65);
    // node a quarter wave above the surface
    CHECK(field_factor(m, 780.0, 195.0) < 1e-4);
    for (double h = 0.0; h < 400.0; h += 25.0) {
        double e = field_factor(m, 780.0, h);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0 + 1e-12);
    }
}

TEST_CASE("transmission spectrum sampling") {
    layer_stack f = fiber_mirror();
    const std::size_t n = 101;
    std::vector<double> wl(n), tr(n);
    transmission_spectrum(f, 600.0, 850.0, n, wl.data(), tr.data());
    CHECK(wl.front() == doctest::Approx(600.0));
    CHECK(wl.back() == doctest::Approx(850.0));
    for (std::size_t i = 0; i < n; i += 10)
        CHECK(tr[i] == doctest::Approx(response_at(f, wl[i]).transmittance).epsilon(1e-12));
    CHECK_THROWS_AS(transmission_spectrum(f, 850.0, 600.0, n, wl.data(), tr.data()),
                    validation_error);
    CHECK_THROWS_AS(transmission_spectrum(f, 600.0, 850.0, 1, wl.data(), tr.data()),
                    validation_error);
}

TEST_CASE("stack validation") {
    layer_stack bad;
    bad.layers.push_back({2.1, -3.0});
    CHECK_THROWS_AS(check_stack(bad), validation_error);
    layer_stack bad2;
    bad2.ambient = 0.0;
    CHECK_THROWS_AS(check_stack(bad2), validation_error);
    layer_stack ok;
    ok.substrate = 1.46;
    CHECK_THROWS_AS(response_at(ok, -1.0), validation_error);
}
