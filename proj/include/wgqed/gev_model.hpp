#pragma once

// GeV four-level electronic structure and the temperature-dependent rate
// models: Bose-Einstein phonon occupation, detailed-balance orbital rates,
// cubic linewidth broadening, linear Rabi-decay scaling, and the phonon
// relaxation estimate.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/errors.hpp"

namespace wgqed {

struct Transition {
  int lower = 0; // 0-based level index
  int upper = 0;
  double radiative_rate_per_ns = 0.0;
  std::string label;
};

struct EmitterModel {
  // relative to level 1 = 0; optical offset kept separately
  std::array<double, 4> level_energies_ghz{};
  double zpl_wavelength_nm = 0.0;
  double zpl_branching = 0.0;
  std::vector<Transition> transitions;
  // relative oscillator strengths of 1-3, 1-4, 2-3, 2-4; not yet measured,
  // defaulting to equal
  std::array<double, 4> branching_weights{0.25, 0.25, 0.25, 0.25};

  double ground_splitting_ghz() const {
    return level_energies_ghz[1] - level_energies_ghz[0];
  }
  double excited_splitting_ghz() const {
    return level_energies_ghz[3] - level_energies_ghz[2];
  }
};

struct PhononEnvironment {
  double temperature_k = 5.0;
  double cubic_a_nm = 0.0;
  double cubic_b_nm_per_k3 = 1.9e-7;
  double cubic_t0_k = -13.0;
  double single_phonon_coefficient_mhz_per_k = 0.88;
  double local_mode_energy_mev = 60.0;
};

// Measured splittings 152 / 981 GHz, ZPL at 602 nm, 60% ZPL branching.
EmitterModel gev_default();

// Bose-Einstein occupation n = 1/(exp(E/kT) - 1); 0 at T = 0.
double thermal_occupation(double mode_energy_mev, double temperature_k);

struct PhononRates {
  double upward_per_ns = 0.0;
  double downward_per_ns = 0.0;
};

// Single-phonon orbital relaxation between levels split by `splitting`:
// downward = base*(n+1), upward = base*n.
PhononRates orbital_phonon_rates(double splitting_ghz, double temperature_k,
                                 double base_rate_per_ns);

// a + b (T - T0)^3, valid for T > 50 K unless allow_below_range.
double linewidth_vs_temperature(const PhononEnvironment &env,
                                double temperature_k,
                                bool allow_below_range = false);

// delta_nu = c * delta_lambda / lambda^2, result in MHz.
double linewidth_nm_to_mhz(double delta_lambda_nm, double center_wavelength_nm);
double linewidth_mhz_to_nm(double delta_nu_mhz, double center_wavelength_nm);

// 1/(2*pi*tau) in MHz.
double lifetime_limited_linewidth(double lifetime_ns);

// gamma_Rabi(T) = intercept + slope*T, all as /(2*pi) MHz values.
double rabi_decay_vs_temperature(double slope_mhz_per_k, double intercept_mhz,
                                 double temperature_k);

// gamma_p = 2*gamma_Rabi - 1.5*gamma_0; throws when negative.
double phonon_relaxation_estimate(double gamma_rabi_mhz, double gamma0_mhz);

} // namespace wgqed
