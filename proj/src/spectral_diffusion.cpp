#include "wgqed/spectral_diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "wgqed/fitting.hpp"
#include "wgqed/rng.hpp"

namespace wgqed {

namespace {

void check_model(const DiffusionModel &m) {
  if (m.rms_amplitude_mhz < 0.0)
    throw InvalidParameterError("rms amplitude must be non-negative");
  if (m.correlation_time_ns <= 0.0)
    throw InvalidParameterError("correlation time must be positive");
}

// Exact OU update over an arbitrary interval.
class OuWalker {
public:
  OuWalker(const DiffusionModel &m, CounterRng rng)
      : sigma_(m.rms_amplitude_mhz), tau_(m.correlation_time_ns),
        rng_(std::move(rng)) {
    x_ = sigma_ > 0.0 ? sigma_ * rng_.normal() : 0.0;
  }

  double value() const { return x_; }

  void advance(double dt_ns) {
    if (dt_ns <= 0.0 || sigma_ == 0.0)
      return;
    const double decay = std::exp(-dt_ns / tau_);
    x_ = x_ * decay + sigma_ * std::sqrt(1.0 - decay * decay) * rng_.normal();
  }

private:
  double sigma_;
  double tau_;
  double x_;
  CounterRng rng_;
};

double lorentzian_peak(double detuning_mhz, double fwhm_mhz) {
  const double hw = fwhm_mhz / 2.0;
  return hw * hw / (detuning_mhz * detuning_mhz + hw * hw);
}

} // namespace

std::vector<double> frequency_trace(const DiffusionModel &model,
                                    const std::vector<double> &times_ns) {
  check_model(model);
  for (std::size_t i = 1; i < times_ns.size(); ++i)
    if (times_ns[i] <= times_ns[i - 1])
      throw InvalidParameterError("times must be strictly increasing");
  std::vector<double> out;
  out.reserve(times_ns.size());
  OuWalker walker(model, CounterRng(model.seed));
  double t_prev = times_ns.empty() ? 0.0 : times_ns.front();
  for (double t : times_ns) {
    walker.advance(t - t_prev);
    out.push_back(walker.value());
    t_prev = t;
  }
  return out;
}

Spectrum averaged_lineshape(double homogeneous_fwhm_mhz,
                            const DiffusionModel &model,
                            const std::vector<double> &scan_mhz,
                            double averaging_time_ns) {
  check_model(model);
  if (homogeneous_fwhm_mhz <= 0.0)
    throw InvalidParameterError("homogeneous FWHM must be positive");
  if (scan_mhz.empty())
    throw InvalidParameterError("scan grid must be non-empty");
  if (averaging_time_ns <= 0.0)
    throw InvalidParameterError("averaging time must be positive");

  // enough samples to cover the window at sub-correlation-time spacing
  std::size_t n = static_cast<std::size_t>(
      std::clamp(10.0 * averaging_time_ns / model.correlation_time_ns, 1000.0,
                 200000.0));
  const double dt = averaging_time_ns / static_cast<double>(n);
  OuWalker walker(model, CounterRng(model.seed));

  std::vector<double> acc(scan_mhz.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = walker.value();
    for (std::size_t j = 0; j < scan_mhz.size(); ++j)
      acc[j] += lorentzian_peak(scan_mhz[j] - c, homogeneous_fwhm_mhz);
    walker.advance(dt);
  }
  Spectrum s;
  s.x_label = "detuning_MHz";
  s.y_label = "fluorescence";
  s.x = scan_mhz;
  s.y.resize(scan_mhz.size());
  for (std::size_t j = 0; j < scan_mhz.size(); ++j)
    s.y[j] = acc[j] / static_cast<double>(n);
  return s;
}

FeedbackResult run_feedback(const FeedbackProtocol &protocol,
                            const DiffusionModel &model,
                            double total_time_ns) {
  check_model(model);
  if (protocol.probe_scan_width_mhz <= 0.0 ||
      protocol.probe_duration_ns <= 0.0 || protocol.measure_duration_ns <= 0.0)
    throw InvalidParameterError("protocol durations/width must be positive");
  if (total_time_ns <= 0.0)
    throw InvalidParameterError("total time must be positive");

  // the line under probe is homogeneous-linewidth wide; use the recenter
  // threshold as a proxy width so the fit resolution matches the protocol
  const double probe_fwhm = std::max(protocol.recenter_threshold_mhz * 4.0,
                                     1.0);
  constexpr int kScanPoints = 41;
  constexpr int kMeasureSamples = 16;

  FeedbackResult res;
  OuWalker walker(model, CounterRng(model.seed));
  double laser_mhz = walker.value(); // locked at start
  double t = 0.0;
  double probe_total = 0.0, measure_total = 0.0;
  double scan_width = protocol.probe_scan_width_mhz;
  double sum_sq = 0.0;
  std::size_t n_samples = 0;
  auto lorentzian = model_lorentzian();

  // sub-ps remainders are roundoff from the min() window clipping; running
  // another probe on them would stall the loop
  while (total_time_ns - t > 1e-3) {
    // probe window: scan across the line, fit, recenter
    const double probe_dt =
        std::min(protocol.probe_duration_ns, total_time_ns - t);
    const double scan_step_dt = probe_dt / kScanPoints;
    std::vector<double> xs(kScanPoints), ys(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
      xs[i] = laser_mhz - scan_width / 2.0 +
              scan_width * i / (kScanPoints - 1);
      ys[i] = lorentzian_peak(xs[i] - walker.value(), probe_fwhm);
      walker.advance(scan_step_dt);
      t += scan_step_dt;
    }
    probe_total += probe_dt;

    bool locked = false;
    const double peak = *std::max_element(ys.begin(), ys.end());
    if (peak > 0.05) { // line visible inside the scan
      try {
        FitResult fr = fit(lorentzian, xs, ys);
        const double center = fr.param(lorentzian, "center");
        if (fr.converged && center > xs.front() && center < xs.back()) {
          laser_mhz = center;
          locked = true;
        }
      } catch (const FitError &) {
      }
    }
    if (locked) {
      scan_width = protocol.probe_scan_width_mhz;
    } else {
      res.lock_lost_events += 1;
      scan_width = std::min(scan_width * 2.0,
                            10.0 * protocol.probe_scan_width_mhz);
      continue; // re-probe with the wider scan before measuring
    }

    if (t >= total_time_ns)
      break;

    // measure window: record residual detuning
    const double measure_dt =
        std::min(protocol.measure_duration_ns, total_time_ns - t);
    const double sample_dt = measure_dt / kMeasureSamples;
    for (int i = 0; i < kMeasureSamples; ++i) {
      walker.advance(sample_dt);
      t += sample_dt;
      const double residual = walker.value() - laser_mhz;
      res.locked_times_ns.push_back(t);
      res.locked_trace_mhz.push_back(residual);
      sum_sq += residual * residual;
      ++n_samples;
    }
    measure_total += measure_dt;
  }

  res.duty_cycle = (probe_total + measure_total) > 0.0
                       ? measure_total / (probe_total + measure_total)
                       : 0.0;
  res.residual_rms_mhz =
      n_samples > 0 ? std::sqrt(sum_sq / static_cast<double>(n_samples)) : 0.0;
  return res;
}

} // namespace wgqed
