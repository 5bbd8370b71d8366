#pragma once

// Single-pass transmission of a weak coherent probe past a
// waveguide-coupled emitter, and the extinction <-> cooperativity algebra.
// Bidirectional convention: gamma_1d counts decay into both guided
// directions; dephasing is folded into gamma_prime (weak-drive limit).

#include <complex>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

struct WaveguideCoupling {
  double gamma_1d_mhz = 0.0;    // decay into the guided mode, both directions
  double gamma_prime_mhz = 0.0; // everything else, incl. pure dephasing

  double total_mhz() const { return gamma_1d_mhz + gamma_prime_mhz; }
};

double cooperativity(const WaveguideCoupling &wg);

// t(delta) = 1 - (G1d/g) / (1 - 2 i delta / g), g = G1d + g'.
std::complex<double> transmission_amplitude(double detuning_mhz,
                                            const WaveguideCoupling &wg);

// 1 - (1/(1+C))^2
double extinction_on_resonance(double cooperativity);

// C = 1/sqrt(1 - ext) - 1
double cooperativity_from_extinction(double extinction);

// |t|^2 tabulated over the detuning grid; the dip is Lorentzian, FWHM = g.
Spectrum transmission_spectrum(const WaveguideCoupling &wg,
                               const std::vector<double> &detunings_mhz);

// With thermal population p2 parked in the non-resonant ground branch the
// dip shallows by (1-p2); the cooperativity inferred from that dip is a
// lower bound on the true value.
double effective_extinction(double cooperativity, double thermal_population);

} // namespace wgqed
