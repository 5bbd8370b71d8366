#pragma once

// Interference of emitter resonance fluorescence with a Bragg-mirror
// reflected local oscillator. The collected output operator is
//   a_out = alpha e^{i phi} + i sqrt(kappa) sigma_minus,
// the i being the scattering phase of the emitter field relative to the
// drive, so phase = pi is the destructive (symmetric-dip) setting and
// phase = pi/2 the dispersive one.

#include <complex>
#include <vector>

#include "wgqed/core_dynamics.hpp"
#include "wgqed/correlation.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

struct LocalOscillator {
  double amplitude = 0.0; // field units, sqrt(photon flux / ns)
  double phase_rad = 0.0; // wrapped into [0, 2pi)
};

struct OutputFieldModel {
  LocalOscillator lo;
  TwoLevelParams emitter; // drive/detuning/decay of the two-level emitter
  double coupling_rate_per_ns = 0.0; // rate into the collected mode

  LindbladGenerator emitter_generator() const {
    return build_two_level_generator(emitter);
  }
};

// alpha e^{i phi} I + i sqrt(kappa) sigma_minus on the two-level space.
ComplexMatrix output_operator(const OutputFieldModel &model);

// Emitter Lindbladian rewritten for photon counting on the displaced
// output: the collected channel carries the displaced operator at unit
// rate, with the compensating Hamiltonian term that keeps the emitter
// dynamics unchanged. Remaining decay and dephasing stay as-is.
LindbladGenerator displaced_generator(const OutputFieldModel &model);

// Steady-state <a_out^dag a_out> versus probe detuning.
Spectrum reflected_intensity_spectrum(const OutputFieldModel &model,
                                      const std::vector<double> &detunings_mhz);

// Normalized g2 of the displaced output via the quantum regression
// theorem; taus non-decreasing, >= 0.
CorrelationFunction homodyne_g2(const OutputFieldModel &model,
                                const std::vector<double> &taus_ns);

// Single polarization knob -> (amplitude, phase): amplitude = max*mix,
// phase interpolating pi -> pi/2. Phenomenological convenience, not a
// waveguide polarization model.
LocalOscillator lo_from_polarization(double mix_parameter,
                                     double max_amplitude);

} // namespace wgqed
