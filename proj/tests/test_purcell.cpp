#include <cmath>
#include <vector>

#include "core/cavity.hpp"
#include "core/emitter.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/purcell.hpp"
#include "core/stack.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {
const mirror_budget working_budget{810e-6, 71e-6, 1900e-6, 23e-6};
}

TEST_CASE("enhancement from quality factor and mode volume") {
    CHECK(ideal_purcell(710.0, 3.5e5, 16.0, 0.44) == doctest::Approx(261.8).epsilon(1e-3));
    CHECK(effective_purcell(710.0, 10.0, 19.0, 0.75, 0.44) ==
          doctest::Approx(4.7239e-3).epsilon(1e-3));
    CHECK_THROWS_AS(ideal_purcell(710.0, -1.0, 16.0, 0.44), validation_error);
    CHECK_THROWS_AS(ideal_purcell(710.0, 1e5, 0.0, 0.44), validation_error);
}

TEST_CASE("orientation averages") {
    CHECK(std::abs(orientation_factor(false) - 0.8) < 1e-6);
    CHECK(std::abs(orientation_factor(true) - 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(orientation_norm() - 1.0) < 1e-9);
}

TEST_CASE("single-line coupling rate") {
    double w710 = omega_from_lambda_nm(710.0);
    double g0 = 2 * pi * 8e6;
    double g = coupling_rate_rad_s(w710, 0.44, 19.0, 0.55, g0, std::sqrt(0.8));
    CHECK(g / (2 * pi) == doctest::Approx(0.4838e9).epsilon(2e-3));
    double gc = coupling_rate_rad_s(w710, 0.44, 19.0, 0.55, g0, 1.0);
    CHECK(gc / (2 * pi) == doctest::Approx(0.5409e9).epsilon(2e-3));
    CHECK_THROWS_AS(coupling_rate_rad_s(w710, -0.1, 19.0, 0.55, g0, 1.0),
                    validation_error);
}

TEST_CASE("summed mode emission rate") {
    emitter_model m = nv_default_model();
    double wc = omega_from_lambda_nm(710.0);
    double kap = decay_rate_rad_s(5.0, working_budget);
    double r = emission_rate_rad_s(m, 19.0, 0.55, 0.8, wc, {}, kap);
    double c = r / m.gamma0_rad_s;
    CHECK(c == doctest::Approx(4.461e-3).epsilon(2e-3));
    // cavity decay barely matters: the sidebands dominate the linewidth
    double r10 = emission_rate_rad_s(m, 19.0, 0.55, 0.8, wc, {}, kap * 10.0);
    CHECK(std::abs(r10 / r - 1.0) < 0.005);
}

TEST_CASE("per-line decay rates from the coating curves") {
    emitter_model m = nv_default_model();
    layer_stack fib = quarter_wave_stack(780.0, 2.10, 1.46, 18, 1.46, false);
    layer_stack mac = quarter_wave_stack(780.0, 2.10, 1.46, 17, 1.46, true);
    std::vector<double> kap;
    for (const transition &t : m.transitions) {
        double lam = 2 * pi * c_nm_s / t.omega_rad_s;
        double tf = response_at(fib, lam).transmittance;
        double tm = response_at(mac, lam).transmittance;
        double s = tf + tm + 71e-6 + 23e-6;
        double r1 = std::max(1.0 - tf - 71e-6, 1e-9);
        double r2 = std::max(1.0 - tm - 23e-6, 1e-9);
        kap.push_back(c_m_s * s / (2 * 5.0e-6 * std::sqrt(r1 * r2)));
    }
    double wc = omega_from_lambda_nm(710.0);
    double r = emission_rate_rad_s(m, 19.0, 0.55, 0.8, wc, kap, 0.0);
    CHECK(r / m.gamma0_rad_s == doctest::Approx(4.608e-3).epsilon(5e-3));
}

TEST_CASE("rate model meets the quality-factor form in the fast-cavity limit") {
    emitter_model one;
    one.gamma0_rad_s = 2 * pi * 8e6;
    double wc = omega_from_lambda_nm(710.0);
    one.transitions.push_back({wc, 1.0, 1e3});
    double kap = 1e12;
    double r = emission_rate_rad_s(one, 19.0, 0.55, 0.8, wc, {}, kap);
    double c_rate = r / one.gamma0_rad_s;
    double c_q = ideal_purcell(710.0, wc / kap, 19.0, 0.55 * 0.8);
    CHECK(std::abs(c_rate / c_q - 1.0) < 0.01);
    CHECK(std::abs(c_rate / c_q - 1.0) < 1e-3);
}

TEST_CASE("ensemble absorption parameter") {
    double w710 = omega_from_lambda_nm(710.0);
    double g = coupling_rate_rad_s(w710, 0.44, 19.0, 0.55, 2 * pi * 8e6, 1.0);
    double kap = pi * c_m_s / (5.0e-6 * 30000.0);  // from the finesse
    double a = collective_alpha(50.0, g, kap, 2 * pi * 25e12);
    CHECK(a == doctest::Approx(2.342e-3).epsilon(2e-3));
    CHECK(a > 5e-4);
    CHECK(a < 5e-3);
    CHECK(collective_alpha(100.0, g, kap, 2 * pi * 25e12) ==
          doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("length sweep scales inversely with mode volume") {
    emitter_model m = nv_default_model();
    std::vector<double> d(18);
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = 5.0 + 34.0 * double(i) / double(d.size() - 1);
    std::vector<volume_sweep_row> rows = sweep_mode_volume(
        m, 100.0, 710.0, working_budget, 0.55, 0.8, 0.75, 10.0, d);
    REQUIRE(rows.size() == d.size());

    double sx = 0, sy1 = 0, sy2 = 0, sxx = 0, sxy1 = 0, sxy2 = 0;
    for (const volume_sweep_row &r : rows) {
        REQUIRE(r.ok);
        double x = std::log(r.v_um3);
        sx += x;
        sxx += x * x;
        sy1 += std::log(r.c_effective);
        sxy1 += x * std::log(r.c_effective);
        sy2 += std::log(r.c_rate);
        sxy2 += x * std::log(r.c_rate);
    }
    double n = double(rows.size());
    double slope_eff = (n * sxy1 - sx * sy1) / (n * sxx - sx * sx);
    double slope_rate = (n * sxy2 - sx * sy2) / (n * sxx - sx * sx);
    CHECK(slope_eff == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(slope_rate == doctest::Approx(-1.0).epsilon(0.02));

    // a single-point sweep equals the direct evaluation
    cavity_geometry g{rows[0].d_eff_um, 100.0, 710.0};
    CHECK(rows[0].v_um3 == doctest::Approx(mode_volume_um3(g)).epsilon(1e-12));
    CHECK(rows[0].c_effective ==
          doctest::Approx(effective_purcell(710.0, 10.0, rows[0].v_um3, 0.75,
                                            0.55 * 0.8)).epsilon(1e-12));

    // unstable geometries are flagged, not silently dropped
    std::vector<volume_sweep_row> bad = sweep_mode_volume(
        m, 100.0, 710.0, working_budget, 0.55, 0.8, 0.75, 10.0, {5.0, 150.0});
    REQUIRE(bad.size() == 2);
    CHECK(bad[0].ok);
    CHECK_FALSE(bad[1].ok);
    CHECK(std::isnan(bad[1].c_rate));
}

TEST_CASE("low-loss short-cavity operating point") {
    mirror_budget b{10e-6, 10e-6, 10e-6, 10e-6};
    strong_coupling_report r = strong_coupling(637.0, 2.0, 10.0, b, 0.02, 1.0,
                                               2 * pi * 8e6, 2 * pi * 500e6);
    CHECK(r.finesse == doctest::Approx(157078.0).epsilon(1e-3));
    CHECK(r.kappa_rad_s / (2 * pi) == doctest::Approx(477.1e6).epsilon(2e-3));
    CHECK(2 * r.g00_rad_s / (2 * pi) == doctest::Approx(1.0775e9).epsilon(2e-3));
    CHECK(r.c_rate == doctest::Approx(147.3).epsilon(5e-3));
    CHECK(r.strong);

    strong_coupling_report slow = strong_coupling(
        637.0, 2.0, 10.0, b, 0.02, 1.0, 2 * pi * 8e6, 2 * pi * 2e9);
    CHECK_FALSE(slow.strong);
}
