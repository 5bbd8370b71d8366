#pragma once

// Photon budget: lifetime-limited flux bound and the multiplicative
// detection chain from emitter to detector.

#include "wgqed/errors.hpp"

namespace wgqed {

struct PhotonBudget {
  double lifetime_ns = 6.1;
  double zpl_branching = 0.60;
  double waveguide_beta = 0.1;      // emission into the guided mode
  double fiber_coupling = 0.5;
  double filter_and_detector = 1.0; // setup-specific, never defaulted by the CLI
};

// 1000/lifetime, in Mcps.
double max_photon_flux(double lifetime_ns);

// excitation rate times every chain fraction; excitation above the
// lifetime bound is rejected.
double detected_rate(const PhotonBudget &budget, double excitation_mcps);

// chain solved for the waveguide emission probability given a measured
// detected rate at saturation
double waveguide_beta_from_detected(double detected_mcps,
                                    double excitation_mcps,
                                    double zpl_branching,
                                    double fiber_coupling,
                                    double filter_and_detector);

} // namespace wgqed
