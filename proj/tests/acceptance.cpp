// End-to-end acceptance checks for the calibrated device numbers and the
// cross-module consistency requirements. One PASS/FAIL line per criterion.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wgqed/budget.hpp"
#include "wgqed/core_dynamics.hpp"
#include "wgqed/fitting.hpp"
#include "wgqed/gev_model.hpp"
#include "wgqed/homodyne.hpp"
#include "wgqed/io.hpp"
#include "wgqed/photon_statistics.hpp"
#include "wgqed/rng.hpp"
#include "wgqed/spectral_diffusion.hpp"
#include "wgqed/units.hpp"
#include "wgqed/waveguide.hpp"

using namespace wgqed;

namespace {

int failures = 0;

void report(int id, const std::string &label, bool ok,
            const std::string &detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id,
              label.c_str(), detail.c_str());
  if (!ok)
    ++failures;
}

void run(int id, const std::string &label,
         const std::function<std::pair<bool, std::string>()> &fn) {
  try {
    auto [ok, detail] = fn();
    report(id, label, ok, detail);
  } catch (const std::exception &e) {
    report(id, label, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// emitter decay calibration shared by several criteria
const double kGamma0Mhz = lifetime_limited_linewidth(6.1); // 26.09 MHz
// pure dephasing chosen so the driven envelope decays in 6.59 ns:
// envelope rate = (3/4) gamma1 + gamma_phi / 2
const double kGammaPhiMhz =
    2.0 * (1000.0 / (2.0 * std::numbers::pi * 6.59)) - 1.5 * kGamma0Mhz;

std::pair<bool, std::string> check_extinction_pair() {
  const double ext = extinction_on_resonance(0.104);
  const double coop = cooperativity_from_extinction(0.18);
  const bool ok = std::abs(ext - 0.18) < 0.01 && std::abs(coop - 0.104) < 0.01;
  return {ok, "ext(C=0.104)=" + fmt(ext) + ", C(ext=0.18)=" + fmt(coop)};
}

std::pair<bool, std::string> check_thermal_occupation() {
  const double n = thermal_occupation(60.0, 450.0);
  return {std::abs(n - 0.27) < 0.005, "n(60 meV, 450 K)=" + fmt(n)};
}

std::pair<bool, std::string> check_lifetime_linewidth() {
  const double w = lifetime_limited_linewidth(6.1);
  return {std::abs(w - 26.1) < 0.5, "linewidth(6.1 ns)=" + fmt(w) + " MHz"};
}

std::pair<bool, std::string> check_phonon_rate_identity() {
  const double gp = phonon_relaxation_estimate(24.0, 26.0);
  return {std::abs(gp - 9.0) < 1e-12, "gamma_p(24, 26)=" + fmt(gp) + " MHz"};
}

std::pair<bool, std::string> check_rabi_refit() {
  TwoLevelParams p{310.0, 0.0, kGamma0Mhz, kGammaPhiMhz, 0.0};
  auto gen = build_two_level_generator(p);
  std::vector<double> times, pops;
  for (int i = 1; i <= 500; ++i)
    times.push_back(0.05 * i);
  auto traj = evolve(gen, DensityOperator::ground(2), times);
  for (const auto &st : traj.states)
    pops.push_back(std::real(st.matrix()(1, 1)));

  auto m = model_damped_rabi();
  auto fr = fit(m, times, pops);
  if (!fr.converged)
    return {false, "fit did not converge"};
  const double f_mhz = fr.param(m, "frequency") * 1000.0; // 1/ns -> MHz
  const double tau = 1.0 / fr.param(m, "gamma");
  const bool ok = std::abs(f_mhz - 310.0) < 2.0 && std::abs(tau - 6.59) < 0.1;
  return {ok, "freq=" + fmt(f_mhz) + " MHz, envelope=" + fmt(tau) + " ns"};
}

std::pair<bool, std::string> check_homodyne_bunching() {
  const double coop = 0.104;
  const double kappa = mhz_to_per_ns(kGamma0Mhz) * coop / (1.0 + coop);
  std::vector<double> taus;
  for (int i = 0; i <= 120; ++i)
    taus.push_back(0.25 * i);

  for (double rabi : {2.0, 4.0, 8.0, 14.0, 22.0}) {
    OutputFieldModel model;
    model.emitter = {rabi, 0.0, kGamma0Mhz, kGammaPhiMhz, 0.0};
    model.coupling_rate_per_ns = kappa;
    auto ss = steady_state(model.emitter_generator());
    const double cancel =
        std::sqrt(kappa) * std::abs((sigma_minus() * ss.matrix()).trace());

    auto g2_zero = [&](double amp) {
      OutputFieldModel mm = model;
      mm.lo = {amp, std::numbers::pi};
      return homodyne_g2(mm, {0.0}).g2[0];
    };
    // g2(0) falls from strong bunching toward 1 as the LO dominates
    double lo_amp = cancel * 1.02, hi_amp = cancel * 200.0;
    if (g2_zero(lo_amp) < 1.09 || g2_zero(hi_amp) > 1.09)
      continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = std::sqrt(lo_amp * hi_amp);
      (g2_zero(mid) > 1.09 ? lo_amp : hi_amp) = mid;
    }
    const double amp = std::sqrt(lo_amp * hi_amp);
    OutputFieldModel tuned = model;
    tuned.lo = {amp, std::numbers::pi};
    auto cf = homodyne_g2(tuned, taus);
    if (cf.g2[0] < 1.06 || cf.g2[0] > 1.12)
      continue;
    auto m = model_exponential();
    auto fr = fit(m, cf.taus_ns, cf.g2);
    if (!fr.converged)
      continue;
    const double tau_b = fr.param(m, "tau");
    if (tau_b < 3.5 || tau_b > 8.9)
      continue;
    std::ostringstream man;
    man << "lo_amplitude = " << format_full_precision(amp) << "\n"
        << "lo_flux_per_ns = " << format_full_precision(amp * amp) << "\n"
        << "lo_phase_rad = " << format_full_precision(std::numbers::pi)
        << "\n"
        << "rabi_mhz = " << format_full_precision(rabi) << "\n"
        << "g2_zero = " << format_full_precision(cf.g2[0]) << "\n"
        << "bunching_tau_ns = " << format_full_precision(tau_b) << "\n";
    atomic_write_text("acceptance_homodyne_manifest.txt", man.str());
    return {true, "g2(0)=" + fmt(cf.g2[0]) + ", tau_b=" + fmt(tau_b) +
                      " ns, LO flux=" + fmt(amp * amp) + "/ns"};
  }
  return {false, "no drive setting met the bunching targets"};
}

// histogrammed jump record vs the regression-theorem curve, 3 sigma per bin
std::pair<bool, std::string> compare_streams_to_qrt(
    const LindbladGenerator &gen, const std::vector<CollectionOp> &coll,
    const ComplexMatrix &field_op, double duration_ns, std::uint64_t seed) {
  auto streams = simulate_timetags(gen, coll, duration_ns, seed);
  const std::size_t total =
      streams[0].tags_ns.size() + streams[1].tags_ns.size();
  auto cf = g2_from_timetags(streams[0], streams[1], 2.0, 40.0);

  auto ss = steady_state(gen);
  ComplexMatrix n_op = field_op.adjoint() * field_op;
  const double mean = std::real((n_op * ss.matrix()).trace());
  double worst = 0.0;
  for (std::size_t i = 0; i < cf.taus_ns.size(); ++i) {
    const double tau = std::abs(cf.taus_ns[i]);
    auto g = two_time_correlation(gen, ss, field_op, n_op, {tau});
    const double expect = std::real(g[0]) / (mean * mean);
    const double sigma =
        std::sqrt(std::max(cf.counts[i], 1.0)) / cf.normalization_per_bin;
    const double dev = std::abs(cf.g2[i] - expect) / (3.0 * sigma + 0.02);
    worst = std::max(worst, dev);
  }
  if (total < 1000000)
    return {false, "only " + std::to_string(total) + " tags"};
  return {worst < 1.0, std::to_string(total) + " tags, worst |dev|/(3sig)=" +
                           fmt(worst)};
}

std::pair<bool, std::string> check_oracle_bare() {
  auto gen = build_two_level_generator(10.0, 0.0, 26.0);
  // all decays monitored, split over an HBT pair
  std::vector<CollectionOp> coll{{sigma_minus(), 0.5}, {sigma_minus(), 0.5}};
  return compare_streams_to_qrt(gen, coll, sigma_minus(), 5.6e7, 101);
}

std::pair<bool, std::string> check_oracle_displaced() {
  OutputFieldModel model;
  model.emitter = {12.0, 0.0, 26.0, 0.0, 0.0};
  model.coupling_rate_per_ns = 0.08;
  model.lo = {0.18, std::numbers::pi};
  auto gen = displaced_generator(model);
  ComplexMatrix a = output_operator(model);
  std::vector<CollectionOp> coll{{a, 0.5}, {a, 0.5}};
  return compare_streams_to_qrt(gen, coll, a, 1.0e8, 202);
}

std::pair<bool, std::string> check_quadruplet_fit() {
  auto m = model_four_lorentzian();
  Eigen::VectorXd truth(13);
  truth << 0.05,
      1.0, -566.5, 120.0,
      0.7, -414.5, 120.0,
      0.9, 414.5, 120.0,
      0.6, 566.5, 120.0;
  std::vector<double> x, y;
  CounterRng rng(55);
  for (int i = 0; i <= 1200; ++i) {
    const double xi = -1200.0 + 2.0 * i;
    x.push_back(xi);
    y.push_back(m.eval(truth, xi) + 0.03 * rng.normal());
  }
  auto fr = fit(m, x, y);
  if (!fr.converged)
    return {false, "fit did not converge"};
  const double c1 = fr.param(m, "center1"), c2 = fr.param(m, "center2");
  const double c3 = fr.param(m, "center3"), c4 = fr.param(m, "center4");
  const double ground = 0.5 * ((c2 - c1) + (c4 - c3));
  const double excited = 0.5 * ((c3 - c1) + (c4 - c2));
  const bool ok = std::abs(ground - 152.0) < 0.01 * 152.0 &&
                  std::abs(excited - 981.0) < 0.01 * 981.0;
  return {ok, "ground split=" + fmt(ground) + " MHz, excited split=" +
                  fmt(excited) + " MHz"};
}

std::pair<bool, std::string> check_saturation_fit() {
  auto m = model_saturation();
  std::vector<double> x, y;
  CounterRng rng(66);
  for (int i = 1; i <= 60; ++i) {
    const double pw = 0.5 * i;
    x.push_back(pw);
    y.push_back(0.79 * pw / (pw + 4.7) * (1.0 + 0.05 * rng.normal()));
  }
  auto fr = fit(m, x, y);
  if (!fr.converged)
    return {false, "fit did not converge"};
  const double r_inf = fr.param(m, "rate_inf");
  const double p_sat = fr.param(m, "x_sat");
  const bool ok = std::abs(r_inf - 0.79) < 0.05 * 0.79 &&
                  std::abs(p_sat - 4.7) < 0.05 * 4.7;
  return {ok, "rate_inf=" + fmt(r_inf) + " Mcps, P_sat=" + fmt(p_sat) +
                  " mW"};
}

std::pair<bool, std::string> check_cubic_fit() {
  PhononEnvironment env; // b = 1.9e-7 nm/K^3, T0 = -13 K
  auto m = model_cubic_linewidth();
  std::vector<double> x, y;
  CounterRng rng(77);
  for (int i = 0; i <= 50; ++i) {
    const double T = 50.0 + 5.0 * i;
    x.push_back(T);
    y.push_back(linewidth_vs_temperature(env, T) *
                (1.0 + 0.05 * rng.normal()));
  }
  auto fr = fit(m, x, y);
  if (!fr.converged)
    return {false, "fit did not converge"};
  const double b = fr.param(m, "b");
  return {std::abs(b - 1.9e-7) < 0.1 * 1.9e-7,
          "b=" + fmt(b) + " nm/K^3 (true 1.9e-7)"};
}

std::pair<bool, std::string> check_invariant_suites() {
  // 1000 randomized Lindblad evolutions keep states physical
  CounterRng rng(88);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + static_cast<int>(rng.uniform() * 3.0);
    ComplexMatrix H(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        H(i, j) = Complex(rng.normal(), rng.normal());
    H = (0.5 * (H + H.adjoint())).eval();
    std::vector<CollapseChannel> ops;
    for (int k = 0; k < 2; ++k) {
      ComplexMatrix L(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          L(i, j) = Complex(rng.normal(), rng.normal());
      ops.push_back({L, rng.uniform()});
    }
    LindbladGenerator gen(H, ops);
    ComplexMatrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        A(i, j) = Complex(rng.normal(), rng.normal());
    ComplexMatrix rho0 = A * A.adjoint();
    rho0 /= rho0.trace();
    auto traj = evolve(gen, DensityOperator(rho0), {0.4});
    const auto &st = traj.states[0];
    if (st.hermiticity_defect() > 1e-10 || st.trace_defect() > 1e-9 ||
        st.min_eigenvalue() < -1e-9)
      return {false, "invariant violated at trial " + std::to_string(trial)};
  }

  // phonon rates satisfy detailed balance on a 20x20 grid
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double split_ghz = 20.0 + 60.0 * i;
      const double T = 2.0 + 25.0 * j;
      auto r = orbital_phonon_rates(split_ghz, T, 1.0);
      const double e_mev = constants::h_meV_per_GHz * split_ghz;
      const double boltz =
          std::exp(-e_mev * 1e-3 / (constants::kB_eV_per_K * T));
      if (std::abs(r.upward_per_ns / r.downward_per_ns - boltz) > 1e-10)
        return {false, "detailed balance broken at " + fmt(split_ghz) +
                           " GHz, " + fmt(T) + " K"};
    }

  // numeric jacobian against the closed-form gradient of the exponential
  auto m = model_exponential();
  Eigen::VectorXd p(3);
  p << 0.3, 1.7, 4.2;
  std::vector<double> xs;
  for (int i = 1; i <= 40; ++i)
    xs.push_back(0.5 * i);
  auto J = numeric_jacobian(m, p, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = std::exp(-xs[i] / p(2));
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    const double scale = std::max(1.0, std::abs(J(r, 2)));
    if (std::abs(J(r, 0) - 1.0) > 1e-6 || std::abs(J(r, 1) - e) > 1e-6 ||
        std::abs(J(r, 2) - p(1) * e * xs[i] / (p(2) * p(2))) > 1e-6 * scale)
      return {false, "jacobian mismatch at x=" + fmt(xs[i])};
  }
  return {true, "1000 evolutions, 400 balance points, jacobian to 1e-6"};
}

std::pair<bool, std::string> check_feedback_lock() {
  FeedbackProtocol proto;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    DiffusionModel dm{300.0, 5e8, seed};
    auto fb = run_feedback(proto, dm, 1e9);
    std::vector<double> times;
    for (int i = 0; i < 1000; ++i)
      times.push_back(1e6 * (i + 1));
    auto free_trace = frequency_trace(dm, times);
    double free_sq = 0.0;
    for (double v : free_trace)
      free_sq += v * v;
    const double free_rms = std::sqrt(free_sq / free_trace.size());
    const double ratio = fb.residual_rms_mhz / free_rms;
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio >= 0.2)
      return {false, "seed " + std::to_string(seed) + ": locked rms " +
                         fmt(fb.residual_rms_mhz) + " vs free " +
                         fmt(free_rms)};
  }
  return {true, "20 seeds, worst locked/free rms ratio " + fmt(worst_ratio)};
}

} // namespace

int main() {
  run(1, "on-resonance extinction matches C = 0.104 both ways",
      check_extinction_pair);
  run(2, "local-mode thermal occupation at 450 K", check_thermal_occupation);
  run(3, "lifetime-limited linewidth of the 6.1 ns emitter",
      check_lifetime_linewidth);
  run(4, "phonon relaxation from Rabi and radiative decay",
      check_phonon_rate_identity);
  run(5, "driven-trace refit recovers 310 MHz and the 6.59 ns envelope",
      check_rabi_refit);
  run(6, "interference-tuned photon bunching with exponential decay",
      check_homodyne_bunching);
  run(7, "jump unraveling vs regression theorem, bare emitter",
      check_oracle_bare);
  run(7, "jump unraveling vs regression theorem, displaced output",
      check_oracle_displaced);
  run(8, "four-peak fit recovers both orbital splittings at 3% noise",
      check_quadruplet_fit);
  run(9, "saturation fit recovers (0.79 Mcps, 4.7 mW) at 5% noise",
      check_saturation_fit);
  run(10, "cubic broadening coefficient recovered at 5% noise",
      check_cubic_fit);
  run(11, "invariant suites: evolution, detailed balance, jacobian",
      check_invariant_suites);
  run(12, "feedback lock beats free-running drift on 20 seeds",
      check_feedback_lock);

  if (failures) {
    std::printf("%d criterion check(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
