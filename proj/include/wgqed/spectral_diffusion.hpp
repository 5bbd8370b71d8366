#pragma once

// Ornstein-Uhlenbeck wander of the emitter resonance and the
// probe-fit-recenter feedback loop that keeps the laser locked to it.

#include <cstdint>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

struct DiffusionModel {
  double rms_amplitude_mhz = 300.0; // stationary standard deviation
  double correlation_time_ns = 1e6;
  std::uint64_t seed = 0;
};

struct FeedbackProtocol {
  double probe_scan_width_mhz = 600.0;
  double probe_duration_ns = 1e5;
  double measure_duration_ns = 9e5;
  double recenter_threshold_mhz = 10.0;

  double duty_cycle() const {
    return measure_duration_ns / (probe_duration_ns + measure_duration_ns);
  }
};

// OU sample path at the given times; stationary start, deterministic per
// seed. Exact discretization, valid for arbitrary (increasing) spacing.
std::vector<double> frequency_trace(const DiffusionModel &model,
                                    const std::vector<double> &times_ns);

// Homogeneous Lorentzian convolved with the sampled frequency
// distribution over the averaging window.
Spectrum averaged_lineshape(double homogeneous_fwhm_mhz,
                            const DiffusionModel &model,
                            const std::vector<double> &scan_mhz,
                            double averaging_time_ns);

struct FeedbackResult {
  std::vector<double> locked_times_ns;
  std::vector<double> locked_trace_mhz; // residual detuning during measure
  double duty_cycle = 0.0;
  double residual_rms_mhz = 0.0;
  int lock_lost_events = 0;
};

// Simulated probe-fit-recenter loop: each probe window scans the line,
// a Lorentzian fit estimates the center and the laser offset is reset;
// a failed fit widens the next scan by 2x (bounded at 10x).
FeedbackResult run_feedback(const FeedbackProtocol &protocol,
                            const DiffusionModel &model, double total_time_ns);

} // namespace wgqed
