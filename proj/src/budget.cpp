#include "wgqed/budget.hpp"

namespace wgqed {

namespace {
void check_fraction(double v, const char *name) {
  if (v < 0.0 || v > 1.0)
    throw InvalidParameterError(std::string(name) + " must lie in [0, 1]");
}
} // namespace

double max_photon_flux(double lifetime_ns) {
  if (lifetime_ns <= 0.0)
    throw InvalidParameterError("lifetime must be positive");
  return 1000.0 / lifetime_ns;
}

double detected_rate(const PhotonBudget &budget, double excitation_mcps) {
  check_fraction(budget.zpl_branching, "zpl_branching");
  check_fraction(budget.waveguide_beta, "waveguide_beta");
  check_fraction(budget.fiber_coupling, "fiber_coupling");
  check_fraction(budget.filter_and_detector, "filter_and_detector");
  if (excitation_mcps < 0.0)
    throw InvalidParameterError("excitation rate must be non-negative");
  if (excitation_mcps > max_photon_flux(budget.lifetime_ns))
    throw DomainError("excitation rate exceeds the lifetime-limited flux");
  return excitation_mcps * budget.zpl_branching * budget.waveguide_beta *
         budget.fiber_coupling * budget.filter_and_detector;
}

double waveguide_beta_from_detected(double detected_mcps,
                                    double excitation_mcps,
                                    double zpl_branching,
                                    double fiber_coupling,
                                    double filter_and_detector) {
  if (excitation_mcps <= 0.0 || zpl_branching <= 0.0 ||
      fiber_coupling <= 0.0 || filter_and_detector <= 0.0)
    throw InvalidParameterError("chain fractions must be positive");
  return detected_mcps /
         (excitation_mcps * zpl_branching * fiber_coupling *
          filter_and_detector);
}

} // namespace wgqed
