#pragma once

// Monte Carlo wave-function unraveling producing photon time-tag
// streams, plus HBT histogramming of time tags. Serves as the
// independent statistical oracle for regression-theorem results.

#include <cstdint>
#include <vector>

#include "wgqed/core_dynamics.hpp"
#include "wgqed/correlation.hpp"

namespace wgqed {

struct TimeTagStream {
  int detector_id = 0;
  std::vector<double> tags_ns; // sorted ascending, within [0, duration]
  double duration_ns = 0.0;

  double rate_per_ns() const {
    return duration_ns > 0.0 ? tags_ns.size() / duration_ns : 0.0;
  }
};

struct CollectionOp {
  ComplexMatrix op;  // must match one of the generator's collapse operators
  double efficiency; // in [0, 1]
};

// Quantum-jump unraveling of gen starting from the ground state.
// No-jump segments use the exact eigendecomposition of the effective
// Hamiltonian; jump times are refined by bisection to 1e-3 ns. Each jump
// through a matched collection operator emits a tag, thinned by
// efficiency. Deterministic per seed (splitmix64 counter streams).
std::vector<TimeTagStream> simulate_timetags(
    const LindbladGenerator &gen, const std::vector<CollectionOp> &collection,
    double duration_ns, std::uint64_t seed);

// Constant-rate Poissonian source, for tests and backgrounds.
TimeTagStream poisson_stream(double rate_per_ns, double duration_ns,
                             std::uint64_t seed, int detector_id = 0);

// Full cross-correlation histogram (all pairs within the window, not
// start-stop) over tau in [-max_tau, max_tau], normalized by
// rate_a * rate_b * bin_width * duration.
CorrelationFunction g2_from_timetags(const TimeTagStream &a,
                                     const TimeTagStream &b,
                                     double bin_width_ns, double max_tau_ns);

// Poisson background merged in, Gaussian timing jitter applied, re-sorted;
// jittered tags falling outside [0, duration] are dropped.
TimeTagStream add_background_and_jitter(const TimeTagStream &stream,
                                        double background_rate_per_ns,
                                        double jitter_sigma_ns,
                                        std::uint64_t seed);

} // namespace wgqed
