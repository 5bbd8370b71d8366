#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wgqed/gev_model.hpp"
#include "wgqed/units.hpp"

using namespace wgqed;

TEST_CASE("default emitter carries the measured splittings") {
  EmitterModel m = gev_default();
  CHECK(m.ground_splitting_ghz() == doctest::Approx(152.0));
  CHECK(m.excited_splitting_ghz() == doctest::Approx(981.0));
  CHECK(m.level_energies_ghz[0] == 0.0);
  CHECK(m.zpl_wavelength_nm == doctest::Approx(602.0));
  CHECK(m.zpl_branching == doctest::Approx(0.60));
}

TEST_CASE("thermal occupation") {
  SUBCASE("local vibrational mode at 450 K") {
    CHECK(std::abs(thermal_occupation(60.0, 450.0) - 0.270) < 0.005);
  }
  SUBCASE("ground-state limit") {
    CHECK(thermal_occupation(60.0, 0.0) == 0.0);
    CHECK(thermal_occupation(1.0, 0.0) == 0.0);
  }
  SUBCASE("orbital splitting at 5 K") {
    // 152 GHz as energy; frozen from direct Bose-Einstein evaluation
    const double e_mev = constants::h_meV_per_GHz * 152.0;
    CHECK(std::abs(thermal_occupation(e_mev, 5.0) - 0.303) < 0.002);
  }
  SUBCASE("rejects non-positive mode energy") {
    CHECK_THROWS_AS(thermal_occupation(0.0, 10.0), InvalidParameterError);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 10.0), InvalidParameterError);
  }
  SUBCASE("monotone in T, decreasing in E; identity n+1 = e^{E/kT} n") {
    double prev = -1.0;
    for (double T : {1.0, 5.0, 50.0, 300.0}) {
      const double n = thermal_occupation(10.0, T);
      CHECK(n > prev);
      prev = n;
    }
    CHECK(thermal_occupation(20.0, 100.0) < thermal_occupation(10.0, 100.0));
    for (double E : {0.1, 1.0, 10.0})
      for (double T : {2.0, 20.0, 200.0}) {
        const double n = thermal_occupation(E, T);
        const double x = E * 1e-3 / (constants::kB_eV_per_K * T);
        CHECK(std::abs((n + 1.0) - std::exp(x) * n) < 1e-12 * (n + 1.0));
      }
  }
}

TEST_CASE("orbital phonon rates") {
  SUBCASE("spontaneous emission only at T -> 0") {
    auto r = orbital_phonon_rates(152.0, 1e-6, 1.0);
    CHECK(r.upward_per_ns == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.downward_per_ns == doctest::Approx(1.0));
  }
  SUBCASE("detailed balance on a 20x20 grid") {
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double split_ghz = 20.0 + 60.0 * i;
        const double T = 2.0 + 25.0 * j;
        auto r = orbital_phonon_rates(split_ghz, T, 1.0);
        const double e_mev = constants::h_meV_per_GHz * split_ghz;
        const double boltz =
            std::exp(-e_mev * 1e-3 / (constants::kB_eV_per_K * T));
        REQUIRE(std::abs(r.upward_per_ns / r.downward_per_ns - boltz) <
                1e-12);
      }
  }
  SUBCASE("152 GHz at 5 K") {
    auto r = orbital_phonon_rates(152.0, 5.0, 1.0);
    CHECK(std::abs(r.upward_per_ns - 0.303) < 0.002);
    CHECK(std::abs(r.downward_per_ns - 1.303) < 0.002);
  }
  SUBCASE("rejects invalid splitting") {
    CHECK_THROWS_AS(orbital_phonon_rates(0.0, 5.0, 1.0),
                    InvalidParameterError);
  }
}

TEST_CASE("cubic phonon broadening") {
  PhononEnvironment env;
  env.cubic_a_nm = 0.0;
  env.cubic_b_nm_per_k3 = 1.9e-7;
  env.cubic_t0_k = -13.0;

  SUBCASE("room temperature value") {
    CHECK(linewidth_vs_temperature(env, 300.0) ==
          doctest::Approx(5.83).epsilon(0.002));
  }
  SUBCASE("cubic term vanishes at T0") {
    PhononEnvironment e2 = env;
    e2.cubic_a_nm = 0.37;
    e2.cubic_t0_k = 77.0;
    CHECK(linewidth_vs_temperature(e2, 77.0, true) ==
          doctest::Approx(0.37));
  }
  SUBCASE("doubling T - T0 scales the cubic term by 8") {
    const double w1 = linewidth_vs_temperature(env, env.cubic_t0_k + 100.0);
    const double w2 = linewidth_vs_temperature(env, env.cubic_t0_k + 200.0);
    CHECK(w2 == doctest::Approx(8.0 * w1).epsilon(1e-12));
  }
  SUBCASE("monotone above T0") {
    double prev = 0.0;
    for (double T = 50.0; T <= 320.0; T += 30.0) {
      const double w = linewidth_vs_temperature(env, T);
      CHECK(w > prev);
      prev = w;
    }
  }
  SUBCASE("validity range enforced unless overridden") {
    CHECK_THROWS_AS(linewidth_vs_temperature(env, 20.0),
                    OutOfModelRangeError);
    CHECK_NOTHROW(linewidth_vs_temperature(env, 20.0, true));
  }
}

TEST_CASE("nm <-> MHz linewidth bridge") {
  CHECK(linewidth_nm_to_mhz(0.0, 602.0) == 0.0);
  CHECK(std::abs(linewidth_nm_to_mhz(1.0, 602.0) - 8.278e5) <
        1e-3 * 8.278e5);
  CHECK(linewidth_nm_to_mhz(2.0, 602.0) ==
        doctest::Approx(2.0 * linewidth_nm_to_mhz(1.0, 602.0)));
  for (double d : {0.01, 0.3, 2.7}) {
    const double back = linewidth_mhz_to_nm(linewidth_nm_to_mhz(d, 602.0),
                                            602.0);
    CHECK(std::abs(back - d) < 1e-10 * d);
  }
}

TEST_CASE("lifetime-limited linewidth") {
  CHECK(std::abs(lifetime_limited_linewidth(6.1) - 26.1) < 0.05);
  CHECK(lifetime_limited_linewidth(1.0 / (2.0 * std::numbers::pi)) ==
        doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(std::abs(lifetime_limited_linewidth(6.6) - 24.1) < 0.1);
  CHECK_THROWS_AS(lifetime_limited_linewidth(0.0), InvalidParameterError);
}

TEST_CASE("Rabi decay vs temperature") {
  CHECK(rabi_decay_vs_temperature(0.0, 17.0, 8.0) == doctest::Approx(17.0));
  // default calibration passes through (5 K, 24 MHz)
  PhononEnvironment env;
  CHECK(rabi_decay_vs_temperature(env.single_phonon_coefficient_mhz_per_k,
                                  19.6, 5.0) == doctest::Approx(24.0));
  const double slope = 1.3, icpt = 4.0;
  for (double T : {2.0, 5.0, 9.0}) {
    CHECK(rabi_decay_vs_temperature(slope, icpt, 2.0 * T) -
              rabi_decay_vs_temperature(slope, icpt, T) ==
          doctest::Approx(slope * T).epsilon(1e-12));
  }
}

TEST_CASE("phonon relaxation estimate") {
  CHECK(phonon_relaxation_estimate(24.0, 26.0) == doctest::Approx(9.0));
  CHECK(phonon_relaxation_estimate(0.75 * 26.0, 26.0) ==
        doctest::Approx(0.0));
  CHECK(phonon_relaxation_estimate(30.0, 26.0) == doctest::Approx(21.0));
  CHECK_THROWS_AS(phonon_relaxation_estimate(10.0, 26.0),
                  ModelInconsistencyError);
}
