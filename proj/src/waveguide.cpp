#include "wgqed/waveguide.hpp"

#include <cmath>

namespace wgqed {

double cooperativity(const WaveguideCoupling &wg) {
  if (wg.gamma_1d_mhz < 0.0 || wg.gamma_prime_mhz < 0.0)
    throw InvalidParameterError("coupling rates must be non-negative");
  if (wg.gamma_prime_mhz == 0.0)
    throw DomainError("cooperativity undefined for gamma_prime = 0");
  return wg.gamma_1d_mhz / wg.gamma_prime_mhz;
}

std::complex<double> transmission_amplitude(double detuning_mhz,
                                            const WaveguideCoupling &wg) {
  const double g = wg.total_mhz();
  if (g <= 0.0)
    throw InvalidParameterError("total decay rate must be positive");
  const std::complex<double> denom(1.0, -2.0 * detuning_mhz / g);
  return 1.0 - (wg.gamma_1d_mhz / g) / denom;
}

double extinction_on_resonance(double cooperativity) {
  if (cooperativity < 0.0)
    throw InvalidParameterError("cooperativity must be non-negative");
  const double t = 1.0 / (1.0 + cooperativity);
  return 1.0 - t * t;
}

double cooperativity_from_extinction(double extinction) {
  if (extinction < 0.0 || extinction >= 1.0)
    throw DomainError("extinction must lie in [0, 1)");
  return 1.0 / std::sqrt(1.0 - extinction) - 1.0;
}

Spectrum transmission_spectrum(const WaveguideCoupling &wg,
                               const std::vector<double> &detunings_mhz) {
  if (detunings_mhz.empty())
    throw InvalidParameterError("detuning grid must be non-empty");
  Spectrum s;
  s.x_label = "detuning_MHz";
  s.y_label = "transmission";
  s.x = detunings_mhz;
  s.y.reserve(detunings_mhz.size());
  for (double d : detunings_mhz)
    s.y.push_back(std::norm(transmission_amplitude(d, wg)));
  return s;
}

double effective_extinction(double cooperativity, double thermal_population) {
  if (thermal_population < 0.0 || thermal_population > 1.0)
    throw InvalidParameterError("population must lie in [0, 1]");
  return (1.0 - thermal_population) * extinction_on_resonance(cooperativity);
}

} // namespace wgqed
