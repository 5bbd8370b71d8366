#include "wgqed/core_dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace wgqed {

namespace {
constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-9;
constexpr double kPosTol = -1e-9;
} // namespace

DensityOperator::DensityOperator(ComplexMatrix elements)
    : mat_(std::move(elements)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
    throw InvalidParameterError("density operator must be square, dim >= 1");
  check_invariants();
}

double DensityOperator::hermiticity_defect() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::trace_defect() const {
  return std::abs(mat_.trace() - Complex(1.0, 0.0));
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      0.5 * (mat_ + mat_.adjoint()));
  return es.eigenvalues().minCoeff();
}

void DensityOperator::check_invariants() const {
  if (hermiticity_defect() > kHermTol)
    throw InvalidParameterError("density operator not Hermitian");
  if (trace_defect() > kTraceTol)
    throw InvalidParameterError("density operator trace != 1");
  if (min_eigenvalue() < kPosTol)
    throw InvalidParameterError("density operator not positive semidefinite");
}

DensityOperator DensityOperator::pure(const ComplexVector &psi) {
  ComplexVector n = psi / psi.norm();
  return DensityOperator(n * n.adjoint());
}

DensityOperator DensityOperator::ground(int dim) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return DensityOperator(m);
}

LindbladGenerator::LindbladGenerator(ComplexMatrix hamiltonian,
                                     std::vector<CollapseChannel> collapse_ops)
    : hamiltonian_(std::move(hamiltonian)),
      collapse_ops_(std::move(collapse_ops)) {
  if (hamiltonian_.rows() != hamiltonian_.cols())
    throw InvalidParameterError("hamiltonian must be square");
  if ((hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameterError("hamiltonian not Hermitian to 1e-12");
  for (const auto &ch : collapse_ops_) {
    if (ch.rate_per_ns < 0.0)
      throw InvalidParameterError("collapse rate must be non-negative");
    if (ch.op.rows() != hamiltonian_.rows() ||
        ch.op.cols() != hamiltonian_.cols())
      throw InvalidParameterError("collapse operator dimension mismatch");
  }
}

ComplexMatrix LindbladGenerator::apply(const ComplexMatrix &rho) const {
  const Complex i(0.0, 1.0);
  ComplexMatrix out = -i * (hamiltonian_ * rho - rho * hamiltonian_);
  for (const auto &ch : collapse_ops_) {
    if (ch.rate_per_ns == 0.0)
      continue;
    ComplexMatrix LdL = ch.op.adjoint() * ch.op;
    out += ch.rate_per_ns * (ch.op * rho * ch.op.adjoint() -
                             0.5 * (LdL * rho + rho * LdL));
  }
  return out;
}

ComplexMatrix LindbladGenerator::vectorized() const {
  const int d = dim();
  const Complex i(0.0, 1.0);
  ComplexMatrix I = ComplexMatrix::Identity(d, d);
  auto kron = [d](const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix k(d * d, d * d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        k.block(r * d, c * d, d, d) = a(r, c) * b;
    return k;
  };
  // column-stacking: vec(A X B) = (B^T kron A) vec(X)
  ComplexMatrix L = -i * (kron(I, hamiltonian_) -
                          kron(hamiltonian_.transpose(), I));
  for (const auto &ch : collapse_ops_) {
    if (ch.rate_per_ns == 0.0)
      continue;
    ComplexMatrix LdL = ch.op.adjoint() * ch.op;
    L += ch.rate_per_ns *
         (kron(ch.op.conjugate(), ch.op) -
          0.5 * (kron(I, LdL) + kron(LdL.transpose(), I)));
  }
  return L;
}

LindbladGenerator build_two_level_generator(double rabi_mhz,
                                            double detuning_mhz,
                                            double gamma0_mhz,
                                            double gamma_dephasing_mhz,
                                            double gamma_extra_decay_mhz) {
  if (gamma0_mhz < 0.0 || gamma_dephasing_mhz < 0.0 ||
      gamma_extra_decay_mhz < 0.0)
    throw InvalidParameterError("decay rates must be non-negative");
  const double omega = mhz_to_rad_per_ns(rabi_mhz);
  const double delta = mhz_to_rad_per_ns(detuning_mhz);
  ComplexMatrix H = ComplexMatrix::Zero(2, 2);
  H(1, 1) = -delta;
  H(0, 1) = omega / 2.0;
  H(1, 0) = omega / 2.0;
  std::vector<CollapseChannel> ops;
  const double gamma_decay =
      mhz_to_per_ns(gamma0_mhz) + mhz_to_per_ns(gamma_extra_decay_mhz);
  if (gamma_decay > 0.0)
    ops.push_back({sigma_minus(), gamma_decay});
  const double gamma_phi = mhz_to_per_ns(gamma_dephasing_mhz);
  if (gamma_phi > 0.0)
    ops.push_back({excited_projector(), 2.0 * gamma_phi});
  return LindbladGenerator(std::move(H), std::move(ops));
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0; // |g><e|
  return m;
}

ComplexMatrix sigma_plus() { return sigma_minus().adjoint(); }

ComplexMatrix excited_projector() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

} // namespace

// Adaptive RK45 from t0 to t1 on a raw (not necessarily trace-one) matrix.
// Used by both evolve() and the regression-theorem path.
ComplexMatrix evolve_matrix(const LindbladGenerator &gen, ComplexMatrix rho,
                            double t0, double t1, const EvolveOptions &opts) {
  if (t1 <= t0)
    return rho;
  double t = t0;
  double span = t1 - t0;
  double h = std::min(span, 0.1);
  ComplexMatrix k1 = gen.apply(rho);
  const double scale_base = std::max(rho.norm(), 1.0);
  while (t < t1) {
    h = std::min(h, t1 - t);
    ComplexMatrix k2 = gen.apply(rho + h * (a21 * k1));
    ComplexMatrix k3 = gen.apply(rho + h * (a31 * k1 + a32 * k2));
    ComplexMatrix k4 = gen.apply(rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
    ComplexMatrix k5 =
        gen.apply(rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    ComplexMatrix k6 = gen.apply(
        rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ComplexMatrix y5 =
        rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    ComplexMatrix k7 = gen.apply(y5); // FSAL
    ComplexMatrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                             e7 * k7);
    const double tol =
        opts.abs_tol + opts.rel_tol * std::max(scale_base, y5.norm());
    const double errnorm = err.norm() / tol;
    if (errnorm <= 1.0) {
      t += h;
      rho = std::move(y5);
      k1 = std::move(k7);
    }
    double factor = (errnorm > 0.0)
                        ? 0.9 * std::pow(errnorm, -0.2)
                        : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw IntegrationFailure("step size underflow", t);
  }
  return rho;
}

Trajectory evolve(const LindbladGenerator &gen, const DensityOperator &rho0,
                  const std::vector<double> &times_ns,
                  const EvolveOptions &opts) {
  if (times_ns.empty())
    throw InvalidParameterError("times must be non-empty");
  for (std::size_t i = 1; i < times_ns.size(); ++i)
    if (times_ns[i] <= times_ns[i - 1])
      throw InvalidParameterError("times must be strictly increasing");

  Trajectory traj;
  traj.times_ns = times_ns;
  ComplexMatrix rho = rho0.matrix();
  double t = 0.0;
  for (double tn : times_ns) {
    rho = evolve_matrix(gen, rho, t, tn, opts);
    t = tn;
    // re-hermitize against integrator roundoff before invariant checks
    ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
    traj.states.emplace_back(sym);
  }
  return traj;
}

DensityOperator steady_state(const LindbladGenerator &gen,
                             double degeneracy_tol) {
  const int d = gen.dim();
  ComplexMatrix L = gen.vectorized();
  Eigen::JacobiSVD<ComplexMatrix> svd(L, Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  const double scale = std::max(sv(0), 1.0);
  int nullity = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < degeneracy_tol * scale)
      ++nullity;
  if (nullity == 0)
    throw NonUniqueSteadyStateError("no stationary state within tolerance");
  if (nullity > 1)
    throw NonUniqueSteadyStateError("degenerate null space: " +
                                    std::to_string(nullity) + " dimensions");
  ComplexVector v = svd.matrixV().col(L.cols() - 1);
  ComplexMatrix rho(d, d);
  for (int c = 0; c < d; ++c)
    rho.col(c) = v.segment(c * d, d);
  rho = (0.5 * (rho + rho.adjoint())).eval();
  Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw NonUniqueSteadyStateError("traceless null vector");
  rho /= tr;
  return DensityOperator(rho);
}

std::vector<Complex> two_time_correlation(const LindbladGenerator &gen,
                                          const DensityOperator &rho_ss,
                                          const ComplexMatrix &op_A,
                                          const ComplexMatrix &op_B,
                                          const std::vector<double> &taus_ns,
                                          const EvolveOptions &opts) {
  for (std::size_t i = 0; i < taus_ns.size(); ++i) {
    if (taus_ns[i] < 0.0)
      throw InvalidParameterError("taus must be non-negative");
    if (i > 0 && taus_ns[i] < taus_ns[i - 1])
      throw InvalidParameterError("taus must be non-decreasing");
  }
  ComplexMatrix seeded = op_A * rho_ss.matrix() * op_A.adjoint();
  std::vector<Complex> out;
  out.reserve(taus_ns.size());
  // evolve at unit norm so the integrator tolerances stay meaningful even
  // for very weak seeds, then undo the scaling on the traces
  const double scale = seeded.norm();
  ComplexMatrix rho = scale > 0.0 ? (seeded / scale).eval() : seeded;
  double t = 0.0;
  for (double tau : taus_ns) {
    rho = evolve_matrix(gen, rho, t, tau, opts);
    t = tau;
    out.push_back((op_B * rho).trace() * scale);
  }
  return out;
}

} // namespace wgqed
