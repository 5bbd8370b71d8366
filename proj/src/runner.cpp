#include "wgqed/runner.hpp"

#include <cstdlib>
#include <sstream>

#include "wgqed/budget.hpp"
#include "wgqed/core_dynamics.hpp"
#include "wgqed/gev_model.hpp"
#include "wgqed/homodyne.hpp"
#include "wgqed/photon_statistics.hpp"
#include "wgqed/rng.hpp"
#include "wgqed/spectral_diffusion.hpp"
#include "wgqed/waveguide.hpp"

namespace wgqed {

namespace fs = std::filesystem;

namespace {

std::vector<double> linspace(double lo, double hi, std::int64_t n) {
  if (n < 2 || hi <= lo)
    throw ValidationError("grid needs at least 2 points and max > min");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> grid_from(const Config &cfg, const std::string &sec,
                              const std::string &prefix) {
  return linspace(cfg.get_double(sec, prefix + "_min"),
                  cfg.get_double(sec, prefix + "_max"),
                  cfg.get_int(sec, prefix + "_points"));
}

TwoLevelParams emitter_from(const Config &cfg, const std::string &sec) {
  TwoLevelParams p;
  p.rabi_mhz = cfg.get_double(sec, "rabi_mhz", 0.0);
  p.detuning_mhz = cfg.get_double(sec, "detuning_mhz", 0.0);
  p.gamma0_mhz = cfg.get_double(sec, "gamma0_mhz");
  p.gamma_dephasing_mhz = cfg.get_double(sec, "gamma_dephasing_mhz", 0.0);
  p.gamma_extra_decay_mhz = cfg.get_double(sec, "gamma_extra_decay_mhz", 0.0);
  return p;
}

// Collects everything written during one run so a failure can clean up.
class RunOutputs {
public:
  explicit RunOutputs(fs::path dir) : dir_(std::move(dir)) {}

  ~RunOutputs() {
    if (!committed_)
      for (const auto &p : written_) {
        std::error_code ec;
        fs::remove(p, ec);
      }
  }

  fs::path dir() const { return dir_; }

  void spectrum(const std::string &name, const Spectrum &s) {
    write_spectrum_csv(track(name), s);
  }
  void csv(const std::string &name, const CsvTable &t) {
    write_csv(track(name), t);
  }
  void correlation(const std::string &name, const CorrelationFunction &cf) {
    write_correlation_csv(track(name), cf);
  }
  void timetags(const std::string &name, const TimeTagStream &s,
                std::uint64_t seed) {
    write_timetags(track(name), s, seed);
  }
  void text(const std::string &name, const std::string &content) {
    atomic_write_text(track(name), content);
  }
  void commit() { committed_ = true; }

private:
  fs::path track(const std::string &name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::string manifest_text(const Config &cfg, const std::string &kind,
                          const std::vector<std::string> &extra = {}) {
  std::ostringstream out;
  out << "version = " << kVersion << "\n";
  out << "rng = " << CounterRng::algorithm()
      << " (child stream k seeded by hash(seed, k))\n";
  out << "kind = " << kind << "\n";
  for (const auto &[section, kv] : cfg.sections()) {
    for (const auto &[k, v] : kv)
      out << "config." << section << "." << k << " = " << v << "\n";
  }
  for (const auto &line : extra)
    out << line << "\n";
  return out.str();
}

std::string plot_script(const std::string &csv_name, const std::string &xlab,
                        const std::string &ylab) {
  std::ostringstream s;
  s << "#!/usr/bin/env python3\n"
    << "import csv, sys\n"
    << "import matplotlib.pyplot as plt\n"
    << "xs, ys = [], []\n"
    << "with open('" << csv_name << "') as f:\n"
    << "    r = csv.DictReader(f)\n"
    << "    cols = r.fieldnames\n"
    << "    for row in r:\n"
    << "        xs.append(float(row[cols[0]]))\n"
    << "        ys.append(float(row[cols[1]]))\n"
    << "plt.plot(xs, ys)\n"
    << "plt.xlabel('" << xlab << "')\n"
    << "plt.ylabel('" << ylab << "')\n"
    << "plt.tight_layout()\n"
    << "out = sys.argv[1] if len(sys.argv) > 1 else '" << csv_name
    << ".png'\n"
    << "plt.savefig(out, dpi=150)\n";
  return s.str();
}

std::uint64_t required_seed(const Config &cfg) {
  if (!cfg.has("run", "seed"))
    throw ValidationError("[run] seed is required for stochastic kinds");
  return static_cast<std::uint64_t>(cfg.get_int("run", "seed"));
}

WaveguideCoupling coupling_from(const Config &cfg, const std::string &sec) {
  WaveguideCoupling wg;
  if (cfg.has(sec, "gamma_1d_mhz")) {
    wg.gamma_1d_mhz = cfg.get_double(sec, "gamma_1d_mhz");
    wg.gamma_prime_mhz = cfg.get_double(sec, "gamma_prime_mhz");
  } else {
    const double C = cfg.get_double(sec, "cooperativity");
    const double total = cfg.get_double(sec, "gamma_total_mhz");
    wg.gamma_1d_mhz = total * C / (1.0 + C);
    wg.gamma_prime_mhz = total / (1.0 + C);
  }
  return wg;
}

void run_transmission(const Config &cfg, RunOutputs &out) {
  const WaveguideCoupling wg = coupling_from(cfg, "transmission");
  auto grid = grid_from(cfg, "transmission", "detuning_mhz");
  Spectrum s = transmission_spectrum(wg, grid);
  out.spectrum("transmission.csv", s);
  out.text("plot_transmission.py",
           plot_script("transmission.csv", s.x_label, s.y_label));
  out.text("run_manifest.txt",
           manifest_text(cfg, "transmission",
                         {"derived.cooperativity = " +
                              format_full_precision(cooperativity(wg)),
                          "derived.extinction = " +
                              format_full_precision(extinction_on_resonance(
                                  cooperativity(wg)))}));
}

void run_spectrum(const Config &cfg, RunOutputs &out) {
  TwoLevelParams p = emitter_from(cfg, "spectrum");
  auto grid = grid_from(cfg, "spectrum", "detuning_mhz");
  Spectrum s;
  s.x_label = "detuning_MHz";
  s.y_label = "excited_population";
  s.x = grid;
  for (double d : grid) {
    TwoLevelParams q = p;
    q.detuning_mhz = d;
    s.y.push_back(
        std::real(steady_state(build_two_level_generator(q)).matrix()(1, 1)));
  }
  out.spectrum("spectrum.csv", s);
  out.text("plot_spectrum.py",
           plot_script("spectrum.csv", s.x_label, s.y_label));
  out.text("run_manifest.txt", manifest_text(cfg, "spectrum"));
}

void run_rabi(const Config &cfg, RunOutputs &out) {
  TwoLevelParams p = emitter_from(cfg, "rabi");
  auto times = grid_from(cfg, "rabi", "time_ns");
  auto gen = build_two_level_generator(p);
  Trajectory traj = evolve(gen, DensityOperator::ground(2), times);
  CsvTable t;
  t.headers = {"time_ns", "excited_population"};
  t.columns.resize(2);
  for (std::size_t i = 0; i < traj.times_ns.size(); ++i) {
    t.columns[0].push_back(traj.times_ns[i]);
    t.columns[1].push_back(std::real(traj.states[i].matrix()(1, 1)));
  }
  out.csv("rabi.csv", t);
  out.text("plot_rabi.py",
           plot_script("rabi.csv", "time_ns", "excited_population"));
  out.text("run_manifest.txt", manifest_text(cfg, "rabi"));
}

void run_g2(const Config &cfg, RunOutputs &out) {
  const std::uint64_t seed = required_seed(cfg);
  TwoLevelParams p = emitter_from(cfg, "g2");
  const double duration = cfg.get_double("g2", "duration_ns");
  const double bin = cfg.get_double("g2", "bin_ns");
  const double window = cfg.get_double("g2", "window_ns");
  const double bg_rate = cfg.get_double("g2", "background_rate_per_ns", 0.0);
  const double jitter = cfg.get_double("g2", "jitter_sigma_ns", 0.0);

  auto gen = build_two_level_generator(p);
  std::vector<CollectionOp> split = {{sigma_minus(), 0.5},
                                     {sigma_minus(), 0.5}};
  auto streams = simulate_timetags(gen, split, duration, seed);
  if (bg_rate > 0.0 || jitter > 0.0)
    for (std::size_t i = 0; i < streams.size(); ++i)
      streams[i] = add_background_and_jitter(streams[i], bg_rate, jitter,
                                             splitmix64(seed) + i);
  CorrelationFunction cf =
      g2_from_timetags(streams[0], streams[1], bin, window);
  out.timetags("tags_a.txt", streams[0], seed);
  out.timetags("tags_b.txt", streams[1], seed);
  out.correlation("g2.csv", cf);
  out.text("plot_g2.py", plot_script("g2.csv", "tau_ns", "g2"));
  out.text("run_manifest.txt",
           manifest_text(cfg, "g2",
                         {"derived.tags_a = " +
                              std::to_string(streams[0].tags_ns.size()),
                          "derived.tags_b = " +
                              std::to_string(streams[1].tags_ns.size())}));
}

void run_homodyne(const Config &cfg, RunOutputs &out) {
  OutputFieldModel model;
  model.emitter = emitter_from(cfg, "homodyne");
  model.coupling_rate_per_ns = cfg.get_double("homodyne", "kappa_per_ns");
  if (cfg.has("homodyne", "lo_mix")) {
    model.lo = lo_from_polarization(cfg.get_double("homodyne", "lo_mix"),
                                    cfg.get_double("homodyne", "lo_max_amplitude"));
  } else {
    model.lo.amplitude = cfg.get_double("homodyne", "lo_amplitude");
    model.lo.phase_rad = cfg.get_double("homodyne", "lo_phase_rad");
  }
  auto grid = grid_from(cfg, "homodyne", "detuning_mhz");
  Spectrum s = reflected_intensity_spectrum(model, grid);
  auto taus = grid_from(cfg, "homodyne", "tau_ns");
  CorrelationFunction cf = homodyne_g2(model, taus);
  out.spectrum("homodyne_spectrum.csv", s);
  out.correlation("homodyne_g2.csv", cf);
  out.text("plot_homodyne_spectrum.py",
           plot_script("homodyne_spectrum.csv", s.x_label, s.y_label));
  out.text("plot_homodyne_g2.py",
           plot_script("homodyne_g2.csv", "tau_ns", "g2"));
  out.text("run_manifest.txt",
           manifest_text(
               cfg, "homodyne",
               {"derived.lo_amplitude = " +
                    format_full_precision(model.lo.amplitude),
                "derived.lo_phase_rad = " +
                    format_full_precision(model.lo.phase_rad),
                "derived.lo_flux_per_ns = " +
                    format_full_precision(model.lo.amplitude *
                                          model.lo.amplitude)}));
}

void run_linewidth_sweep(const Config &cfg, RunOutputs &out) {
  PhononEnvironment env;
  env.cubic_a_nm = cfg.get_double("linewidth", "cubic_a_nm", env.cubic_a_nm);
  env.cubic_b_nm_per_k3 =
      cfg.get_double("linewidth", "cubic_b_nm_per_k3", env.cubic_b_nm_per_k3);
  env.cubic_t0_k = cfg.get_double("linewidth", "cubic_t0_k", env.cubic_t0_k);
  const double zpl_nm =
      cfg.get_double("linewidth", "center_wavelength_nm", 602.0);
  auto temps = grid_from(cfg, "linewidth", "temperature_k");
  CsvTable t;
  t.headers = {"temperature_K", "linewidth_nm", "linewidth_MHz"};
  t.columns.resize(3);
  for (double T : temps) {
    const double nm = linewidth_vs_temperature(env, T);
    t.columns[0].push_back(T);
    t.columns[1].push_back(nm);
    t.columns[2].push_back(linewidth_nm_to_mhz(nm, zpl_nm));
  }
  out.csv("linewidth_sweep.csv", t);
  out.text("plot_linewidth_sweep.py",
           plot_script("linewidth_sweep.csv", "temperature_K",
                       "linewidth_nm"));
  out.text("run_manifest.txt", manifest_text(cfg, "linewidth-sweep"));
}

void run_feedback_kind(const Config &cfg, RunOutputs &out) {
  const std::uint64_t seed = required_seed(cfg);
  DiffusionModel dm;
  dm.rms_amplitude_mhz = cfg.get_double("feedback", "rms_amplitude_mhz");
  dm.correlation_time_ns = cfg.get_double("feedback", "correlation_time_ns");
  dm.seed = seed;
  FeedbackProtocol proto;
  proto.probe_scan_width_mhz =
      cfg.get_double("feedback", "probe_scan_width_mhz");
  proto.probe_duration_ns = cfg.get_double("feedback", "probe_duration_ns");
  proto.measure_duration_ns =
      cfg.get_double("feedback", "measure_duration_ns");
  proto.recenter_threshold_mhz =
      cfg.get_double("feedback", "recenter_threshold_mhz", 10.0);
  const double total = cfg.get_double("feedback", "total_time_ns");

  FeedbackResult fb = run_feedback(proto, dm, total);
  CsvTable locked;
  locked.headers = {"time_ns", "detuning_MHz"};
  locked.columns = {fb.locked_times_ns, fb.locked_trace_mhz};
  out.csv("locked_trace.csv", locked);

  // free-running reference with the same seed
  std::vector<double> times;
  for (double tt = 0.0; tt < total; tt += total / 2000.0)
    times.push_back(tt + total / 4000.0);
  auto free_trace = frequency_trace(dm, times);
  CsvTable freec;
  freec.headers = {"time_ns", "detuning_MHz"};
  freec.columns = {times, free_trace};
  out.csv("free_trace.csv", freec);
  out.text("plot_feedback.py",
           plot_script("locked_trace.csv", "time_ns", "detuning_MHz"));
  out.text("run_manifest.txt",
           manifest_text(cfg, "feedback",
                         {"derived.duty_cycle = " +
                              format_full_precision(fb.duty_cycle),
                          "derived.residual_rms_mhz = " +
                              format_full_precision(fb.residual_rms_mhz),
                          "derived.lock_lost_events = " +
                              std::to_string(fb.lock_lost_events)}));
}

void run_saturation(const Config &cfg, RunOutputs &out) {
  const double r_inf = cfg.get_double("saturation", "rate_inf_mcps");
  const double x_sat = cfg.get_double("saturation", "power_sat_mw");
  const double noise = cfg.get_double("saturation", "noise_fraction", 0.0);
  auto powers = grid_from(cfg, "saturation", "power_mw");
  CsvTable t;
  t.headers = {"power_mW", "rate_Mcps"};
  t.columns.resize(2);
  CounterRng rng(noise > 0.0 ? required_seed(cfg) : 0);
  for (double pw : powers) {
    double r = r_inf * pw / (pw + x_sat);
    if (noise > 0.0)
      r *= 1.0 + noise * rng.normal();
    t.columns[0].push_back(pw);
    t.columns[1].push_back(r);
  }
  out.csv("saturation.csv", t);
  out.text("plot_saturation.py",
           plot_script("saturation.csv", "power_mW", "rate_Mcps"));
  out.text("run_manifest.txt", manifest_text(cfg, "saturation"));
}

void run_budget(const Config &cfg, RunOutputs &out) {
  PhotonBudget b;
  b.lifetime_ns = cfg.get_double("budget", "lifetime_ns");
  b.zpl_branching = cfg.get_double("budget", "zpl_branching");
  b.waveguide_beta = cfg.get_double("budget", "waveguide_beta");
  b.fiber_coupling = cfg.get_double("budget", "fiber_coupling");
  // setup-specific and not published; must be stated explicitly
  b.filter_and_detector = cfg.get_double("budget", "filter_and_detector");
  const double exc = cfg.get_double("budget", "excitation_mcps");
  const double flux = max_photon_flux(b.lifetime_ns);
  const double det = detected_rate(b, exc);
  std::ostringstream rep;
  rep << "max_photon_flux_mcps = " << format_full_precision(flux) << "\n"
      << "detected_rate_mcps = " << format_full_precision(det) << "\n";
  if (cfg.has("budget", "measured_detected_mcps")) {
    const double beta = waveguide_beta_from_detected(
        cfg.get_double("budget", "measured_detected_mcps"), exc,
        b.zpl_branching, b.fiber_coupling, b.filter_and_detector);
    rep << "waveguide_beta_inferred = " << format_full_precision(beta)
        << "\n";
  }
  out.text("budget.txt", rep.str());
  out.text("run_manifest.txt", manifest_text(cfg, "budget"));
}

} // namespace

fs::path resolve_output_dir(const Config &config) {
  if (config.has("run", "output_dir"))
    return config.get("run", "output_dir");
  if (const char *env = std::getenv("WGQED_OUTPUT_DIR"))
    return env;
  return ".";
}

void run_experiment(const Config &config, const fs::path &output_dir) {
  const std::string kind = config.get("run", "kind");
  fs::create_directories(output_dir);
  RunOutputs out(output_dir);
  if (kind == "transmission")
    run_transmission(config, out);
  else if (kind == "spectrum")
    run_spectrum(config, out);
  else if (kind == "rabi")
    run_rabi(config, out);
  else if (kind == "g2")
    run_g2(config, out);
  else if (kind == "homodyne")
    run_homodyne(config, out);
  else if (kind == "linewidth-sweep")
    run_linewidth_sweep(config, out);
  else if (kind == "feedback")
    run_feedback_kind(config, out);
  else if (kind == "saturation")
    run_saturation(config, out);
  else if (kind == "budget")
    run_budget(config, out);
  else
    throw ValidationError("unknown experiment kind: " + kind);
  out.commit();
}

} // namespace wgqed
