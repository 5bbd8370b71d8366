#include "wgqed/homodyne.hpp"

#include <cmath>
#include <numbers>

namespace wgqed {

namespace {

Complex lo_field(const LocalOscillator &lo) {
  return lo.amplitude * std::exp(Complex(0.0, lo.phase_rad));
}

ComplexMatrix emitter_field_op(double coupling_rate_per_ns) {
  return Complex(0.0, 1.0) * std::sqrt(coupling_rate_per_ns) * sigma_minus();
}

} // namespace

ComplexMatrix output_operator(const OutputFieldModel &model) {
  if (model.coupling_rate_per_ns < 0.0)
    throw InvalidParameterError("coupling rate must be non-negative");
  return lo_field(model.lo) * ComplexMatrix::Identity(2, 2) +
         emitter_field_op(model.coupling_rate_per_ns);
}

LindbladGenerator displaced_generator(const OutputFieldModel &model) {
  const double kappa = model.coupling_rate_per_ns;
  const double gamma_total = mhz_to_per_ns(model.emitter.gamma0_mhz) +
                             mhz_to_per_ns(model.emitter.gamma_extra_decay_mhz);
  if (kappa > gamma_total + 1e-12)
    throw InvalidParameterError(
        "collected rate exceeds total emitter decay rate");
  LindbladGenerator bare = model.emitter_generator();

  const Complex beta = lo_field(model.lo);
  const ComplexMatrix E = emitter_field_op(kappa);
  // D[E + beta] = D[E] - i [H_s, .] with H_s = (i/2)(conj(beta) E - beta E^dag)
  const Complex i(0.0, 1.0);
  ComplexMatrix H_s =
      (i / 2.0) * (std::conj(beta) * E - beta * E.adjoint());
  ComplexMatrix H = bare.hamiltonian() - H_s;

  std::vector<CollapseChannel> ops;
  ops.push_back({output_operator(model), 1.0}); // collected, displaced
  if (gamma_total - kappa > 1e-15)
    ops.push_back({sigma_minus(), gamma_total - kappa}); // unmonitored decay
  const double gamma_phi = mhz_to_per_ns(model.emitter.gamma_dephasing_mhz);
  if (gamma_phi > 0.0)
    ops.push_back({excited_projector(), 2.0 * gamma_phi});
  return LindbladGenerator(std::move(H), std::move(ops));
}

Spectrum reflected_intensity_spectrum(
    const OutputFieldModel &model, const std::vector<double> &detunings_mhz) {
  Spectrum s;
  s.x_label = "detuning_MHz";
  s.y_label = "intensity_per_ns";
  s.x = detunings_mhz;
  s.y.reserve(detunings_mhz.size());
  for (double d : detunings_mhz) {
    OutputFieldModel m = model;
    m.emitter.detuning_mhz = d;
    DensityOperator rho = steady_state(m.emitter_generator());
    ComplexMatrix a = output_operator(m);
    s.y.push_back(std::real((a.adjoint() * a * rho.matrix()).trace()));
  }
  return s;
}

CorrelationFunction homodyne_g2(const OutputFieldModel &model,
                                const std::vector<double> &taus_ns) {
  LindbladGenerator gen = model.emitter_generator();
  DensityOperator rho_ss = steady_state(gen);
  ComplexMatrix a = output_operator(model);
  ComplexMatrix n_op = a.adjoint() * a;
  const double mean =
      std::real((n_op * rho_ss.matrix()).trace());
  if (mean <= 0.0)
    throw NormalizationError("zero mean output intensity");
  std::vector<Complex> g = two_time_correlation(gen, rho_ss, a, n_op, taus_ns);
  CorrelationFunction cf;
  cf.taus_ns = taus_ns;
  cf.g2.reserve(g.size());
  for (const Complex &v : g)
    cf.g2.push_back(std::real(v) / (mean * mean));
  return cf;
}

LocalOscillator lo_from_polarization(double mix_parameter,
                                     double max_amplitude) {
  if (mix_parameter < 0.0 || mix_parameter > 1.0)
    throw InvalidParameterError("mix parameter must lie in [0, 1]");
  LocalOscillator lo;
  lo.amplitude = max_amplitude * mix_parameter;
  lo.phase_rad =
      std::numbers::pi - (std::numbers::pi / 2.0) * mix_parameter;
  return lo;
}

} // namespace wgqed
