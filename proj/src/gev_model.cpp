#include "wgqed/gev_model.hpp"

#include <cmath>
#include <numbers>

#include "wgqed/units.hpp"

namespace wgqed {

EmitterModel gev_default() {
  EmitterModel m;
  const double zpl_nm = 602.0;
  const double e_zpl_ghz = constants::c_m_per_s / (zpl_nm * 1e-9) * 1e-9;
  m.level_energies_ghz = {0.0, 152.0, e_zpl_ghz - 981.0, e_zpl_ghz};
  m.zpl_wavelength_nm = zpl_nm;
  m.zpl_branching = 0.60;
  const double rate = 1.0 / 6.1;
  m.transitions = {
      {0, 2, rate * m.branching_weights[0], "1-3"},
      {0, 3, rate * m.branching_weights[1], "1-4"},
      {1, 2, rate * m.branching_weights[2], "2-3"},
      {1, 3, rate * m.branching_weights[3], "2-4"},
  };
  return m;
}

double thermal_occupation(double mode_energy_mev, double temperature_k) {
  if (mode_energy_mev <= 0.0)
    throw InvalidParameterError("mode energy must be positive");
  if (temperature_k < 0.0)
    throw InvalidParameterError("temperature must be non-negative");
  if (temperature_k == 0.0)
    return 0.0;
  const double x =
      mode_energy_mev * 1e-3 / (constants::kB_eV_per_K * temperature_k);
  return 1.0 / std::expm1(x);
}

PhononRates orbital_phonon_rates(double splitting_ghz, double temperature_k,
                                 double base_rate_per_ns) {
  if (splitting_ghz <= 0.0)
    throw InvalidParameterError("splitting must be positive");
  const double e_mev = constants::h_meV_per_GHz * splitting_ghz;
  const double n = thermal_occupation(e_mev, temperature_k);
  return {base_rate_per_ns * n, base_rate_per_ns * (n + 1.0)};
}

double linewidth_vs_temperature(const PhononEnvironment &env,
                                double temperature_k, bool allow_below_range) {
  if (temperature_k < 50.0 && !allow_below_range)
    throw OutOfModelRangeError(
        "cubic broadening model is stated for T > 50 K");
  const double dt = temperature_k - env.cubic_t0_k;
  return env.cubic_a_nm + env.cubic_b_nm_per_k3 * dt * dt * dt;
}

double linewidth_nm_to_mhz(double delta_lambda_nm,
                           double center_wavelength_nm) {
  if (center_wavelength_nm <= 0.0)
    throw InvalidParameterError("center wavelength must be positive");
  // c in nm/s over nm^2 -> Hz, then MHz
  const double hz = constants::c_m_per_s * 1e9 * delta_lambda_nm /
                    (center_wavelength_nm * center_wavelength_nm);
  return hz * 1e-6;
}

double linewidth_mhz_to_nm(double delta_nu_mhz, double center_wavelength_nm) {
  if (center_wavelength_nm <= 0.0)
    throw InvalidParameterError("center wavelength must be positive");
  return delta_nu_mhz * 1e6 * center_wavelength_nm * center_wavelength_nm /
         (constants::c_m_per_s * 1e9);
}

double lifetime_limited_linewidth(double lifetime_ns) {
  if (lifetime_ns <= 0.0)
    throw InvalidParameterError("lifetime must be positive");
  return 1e3 / (2.0 * std::numbers::pi * lifetime_ns);
}

double rabi_decay_vs_temperature(double slope_mhz_per_k, double intercept_mhz,
                                 double temperature_k) {
  if (temperature_k <= 0.0)
    throw InvalidParameterError("temperature must be positive");
  return intercept_mhz + slope_mhz_per_k * temperature_k;
}

double phonon_relaxation_estimate(double gamma_rabi_mhz, double gamma0_mhz) {
  const double gp = 2.0 * gamma_rabi_mhz - 1.5 * gamma0_mhz;
  if (gp < 0.0)
    throw ModelInconsistencyError(
        "2*gamma_Rabi - 1.5*gamma_0 negative: gamma_Rabi=" +
        std::to_string(gamma_rabi_mhz) + " MHz, gamma_0=" +
        std::to_string(gamma0_mhz) + " MHz");
  return gp;
}

} // namespace wgqed
