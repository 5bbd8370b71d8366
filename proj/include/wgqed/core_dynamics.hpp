#pragma once

// Lindblad master equation machinery for small (dim <= 8) systems:
// generator construction, adaptive time evolution, steady states and
// two-time correlation functions via the quantum regression theorem.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/units.hpp"

namespace wgqed {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Hermitian, unit-trace, positive-semidefinite state of a small system.
class DensityOperator {
public:
  DensityOperator(ComplexMatrix elements);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix &matrix() const { return mat_; }

  double hermiticity_defect() const;
  double trace_defect() const;
  double min_eigenvalue() const;

  // Throws InvalidParameterError when any invariant is violated beyond
  // the stated tolerances (hermiticity 1e-10, trace 1e-9, positivity -1e-9).
  void check_invariants() const;

  static DensityOperator pure(const ComplexVector &psi);
  static DensityOperator ground(int dim);

private:
  ComplexMatrix mat_;
};

struct CollapseChannel {
  ComplexMatrix op;
  double rate_per_ns; // >= 0
};

// dr/dt = -i[H, r] + sum_k rate_k (L r L^dag - 1/2 {L^dag L, r}).
// Hamiltonian in rad/ns, rates in 1/ns.
class LindbladGenerator {
public:
  LindbladGenerator(ComplexMatrix hamiltonian,
                    std::vector<CollapseChannel> collapse_ops);

  int dim() const { return static_cast<int>(hamiltonian_.rows()); }
  const ComplexMatrix &hamiltonian() const { return hamiltonian_; }
  const std::vector<CollapseChannel> &collapse_ops() const {
    return collapse_ops_;
  }

  ComplexMatrix apply(const ComplexMatrix &rho) const;

  // (dim^2 x dim^2) matrix acting on column-stacked rho.
  ComplexMatrix vectorized() const;

private:
  ComplexMatrix hamiltonian_;
  std::vector<CollapseChannel> collapse_ops_;
};

struct Trajectory {
  std::vector<double> times_ns;
  std::vector<DensityOperator> states;
};

struct TwoLevelParams {
  double rabi_mhz = 0.0;      // Omega/(2*pi)
  double detuning_mhz = 0.0;  // delta/(2*pi), laser minus atom
  double gamma0_mhz = 0.0;    // radiative decay gamma0/(2*pi)
  double gamma_dephasing_mhz = 0.0;
  double gamma_extra_decay_mhz = 0.0;
};

// Rotating-frame two-level generator:
//   H = -delta |e><e| + (Omega/2)(|e><g| + |g><e|)
// collapse ops: sigma_minus at gamma0 + gamma_extra, dephasing |e><e| at
// rate 2*gamma_phi (coherence decay gamma/2 + gamma_phi).
LindbladGenerator build_two_level_generator(double rabi_mhz,
                                            double detuning_mhz,
                                            double gamma0_mhz,
                                            double gamma_dephasing_mhz = 0.0,
                                            double gamma_extra_decay_mhz = 0.0);

inline LindbladGenerator build_two_level_generator(const TwoLevelParams &p) {
  return build_two_level_generator(p.rabi_mhz, p.detuning_mhz, p.gamma0_mhz,
                                   p.gamma_dephasing_mhz,
                                   p.gamma_extra_decay_mhz);
}

ComplexMatrix sigma_minus();
ComplexMatrix sigma_plus();
ComplexMatrix excited_projector();

struct EvolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
};

// Adaptive Dormand-Prince RK45 on the vectorized density matrix.
Trajectory evolve(const LindbladGenerator &gen, const DensityOperator &rho0,
                  const std::vector<double> &times_ns,
                  const EvolveOptions &opts = {});

// Adaptive step from t0 to t1 on a raw matrix (no trace/positivity
// checks); the workhorse behind evolve() and the regression theorem.
ComplexMatrix evolve_matrix(const LindbladGenerator &gen, ComplexMatrix rho,
                            double t0, double t1,
                            const EvolveOptions &opts = {});

// Null space of the vectorized generator with the trace constraint
// appended; throws NonUniqueSteadyStateError when the null space is
// degenerate within tolerance.
DensityOperator steady_state(const LindbladGenerator &gen,
                             double degeneracy_tol = 1e-8);

// <A^dag(0) B(tau) A(0)> by the quantum regression theorem: evolve
// A rho_ss A^dag under gen, trace against B at each tau.
std::vector<Complex> two_time_correlation(const LindbladGenerator &gen,
                                          const DensityOperator &rho_ss,
                                          const ComplexMatrix &op_A,
                                          const ComplexMatrix &op_B,
                                          const std::vector<double> &taus_ns,
                                          const EvolveOptions &opts = {});

} // namespace wgqed
