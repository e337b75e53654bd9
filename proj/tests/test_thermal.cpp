// test_thermal.cpp — temperature curves, resonance crossing, pumping regions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcdyn/thermal.hpp"

#include <cmath>
#include <stdexcept>

using namespace jcdyn;

TEST_CASE("default model carries the reference constants") {
    ThermalModel m;
    CHECK(m.omega_c0 == doctest::Approx(1043.27));
    CHECK(m.a_idx == doctest::Approx(0.852e-5));
    CHECK(m.E_g0 == doctest::Approx(1044.5));
    CHECK(m.alpha_v == doctest::Approx(0.7));
    CHECK(m.beta_v == doctest::Approx(590.0));
    CHECK(m.P_tilde == doctest::Approx(0.45));
    CHECK(m.A == doctest::Approx(0.5));
    CHECK(m.B == doctest::Approx(0.2));
    CHECK(m.T_prime == doctest::Approx(30.0));
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("curve values at 20 K") {
    ThermalModel m;
    CHECK(cavity_energy(20.0, m) ==
          doctest::Approx(1043.0922570793937).epsilon(1e-12));
    CHECK(exciton_energy(20.0, m) ==
          doctest::Approx(1044.0409836065573).epsilon(1e-12));
    CHECK(phonon_rate(20.0, m) ==
          doctest::Approx(9.585628102728e-02).epsilon(1e-10));
}

TEST_CASE("curve shapes over the working range") {
    ThermalModel m;
    double prev_c = cavity_energy(0.0, m);
    double prev_x = exciton_energy(0.0, m);
    double prev_p = phonon_rate(0.0, m);
    for (double T = 5.0; T <= 300.0; T += 5.0) {
        double c = cavity_energy(T, m);
        double x = exciton_energy(T, m);
        double p = phonon_rate(T, m);
        CHECK(c < prev_c);  // refractive-index drift redshifts the cavity
        CHECK(x < prev_x);  // band-gap shrinkage redshifts the emitter faster
        if (T <= 120.0) {
            // strictly activating until the sigmoid saturates to P_tilde at
            // double precision
            CHECK(p > prev_p);
            CHECK(p < m.P_tilde);
        } else {
            CHECK(p >= prev_p);
            CHECK(p <= m.P_tilde);
        }
        prev_c = c;
        prev_x = x;
        prev_p = p;
    }
    // at base temperature the emitter sits above the cavity
    CHECK(exciton_energy(0.0, m) > cavity_energy(0.0, m));
}

TEST_CASE("resonance crossing location") {
    ThermalModel m;
    ResonancePoint rp = resonance_temperature(m);
    CHECK(rp.T0 == doctest::Approx(37.423736134626296).epsilon(1e-8));
    CHECK(rp.omega0 == doctest::Approx(1042.9374591493274).epsilon(1e-10));
    CHECK(std::abs(cavity_energy(rp.T0, m) - exciton_energy(rp.T0, m)) < 1e-7);
}

TEST_CASE("resonance search fails cleanly when the curves never cross") {
    ThermalModel m;
    m.E_g0 = 900.0;  // emitter starts far below the cavity and only drops
    CHECK_THROWS_AS(resonance_temperature(m), std::runtime_error);
}

TEST_CASE("region classification by pumping ratio") {
    ThermalModel m;
    CHECK(classify_region(phonon_rate(10.0, m), m) == Region::I);
    CHECK(classify_region(phonon_rate(20.0, m), m) == Region::II);
    CHECK(classify_region(phonon_rate(34.0, m), m) == Region::III);

    // boundaries belong to the higher region
    CHECK(classify_region(0.1 * m.P_tilde, m) == Region::II);
    CHECK(classify_region(0.8 * m.P_tilde, m) == Region::III);
    CHECK(classify_region(0.1 * m.P_tilde - 1e-12, m) == Region::I);
    CHECK(classify_region(0.8 * m.P_tilde - 1e-12, m) == Region::II);

    CHECK(region_name(Region::I) == std::string("I"));
    CHECK(region_name(Region::II) == std::string("II"));
    CHECK(region_name(Region::III) == std::string("III"));

    CHECK_THROWS_AS(classify_region(-1e-3, m), std::invalid_argument);
    CHECK_THROWS_AS(classify_region(m.P_tilde * 1.001, m), std::invalid_argument);
}

TEST_CASE("region boundary temperatures (closed form and round trip)") {
    ThermalModel m;
    double t_i_ii = region_boundary_temperature(0.1, m);
    double t_ii_iii = region_boundary_temperature(0.8, m);
    CHECK(t_i_ii == doctest::Approx(15.548141210519177).epsilon(1e-12));
    CHECK(t_ii_iii == doctest::Approx(33.465735902799726).epsilon(1e-12));
    CHECK(phonon_rate(t_i_ii, m) / m.P_tilde == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(phonon_rate(t_ii_iii, m) / m.P_tilde ==
          doctest::Approx(0.8).epsilon(1e-12));

    CHECK_THROWS_AS(region_boundary_temperature(0.0, m), std::invalid_argument);
    CHECK_THROWS_AS(region_boundary_temperature(1.0, m), std::invalid_argument);
    CHECK_THROWS_AS(region_boundary_temperature(-0.2, m), std::invalid_argument);
}

TEST_CASE("pumping ratios at the narrative temperatures") {
    ThermalModel m;
    double r15 = phonon_rate(15.0, m) / m.P_tilde;
    double r33 = phonon_rate(33.0, m) / m.P_tilde;
    CHECK(r15 == doctest::Approx(0.090557).epsilon(1e-4));
    CHECK(r33 == doctest::Approx(0.784678).epsilon(1e-4));
}

TEST_CASE("input validation") {
    ThermalModel m;
    CHECK_THROWS_AS(cavity_energy(-1.0, m), std::invalid_argument);
    CHECK_THROWS_AS(exciton_energy(-0.5, m), std::invalid_argument);
    CHECK_THROWS_AS(phonon_rate(-273.0, m), std::invalid_argument);

    ThermalModel bad = m;
    bad.P_tilde = -0.1;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("P_tilde"),
                         std::invalid_argument);
    bad = m;
    bad.beta_v = 0.0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("beta_v"),
                         std::invalid_argument);
    bad = m;
    bad.B = -0.2;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("B"),
                         std::invalid_argument);
}
