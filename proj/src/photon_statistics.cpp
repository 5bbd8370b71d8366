#include "wgqed/photon_statistics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "wgqed/rng.hpp"

namespace wgqed {

namespace {

constexpr double kJumpTimeResolution_ns = 1e-3;

struct Channel {
  ComplexMatrix op;
  double rate;
  // (detector index, cumulative efficiency) for collection ops on this
  // channel; a jump draws one detector or none.
  std::vector<std::pair<int, double>> detectors;
};

// Exact no-jump propagator psi(t) = V exp(lambda t) V^-1 psi(0) for the
// effective Hamiltonian H_eff = H - (i/2) sum rate_k L_k^dag L_k.
class NoJumpPropagator {
public:
  explicit NoJumpPropagator(const LindbladGenerator &gen) {
    const Complex i(0.0, 1.0);
    ComplexMatrix H_eff = gen.hamiltonian();
    for (const auto &ch : gen.collapse_ops())
      H_eff -= (i / 2.0) * ch.rate_per_ns * (ch.op.adjoint() * ch.op);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(-i * H_eff);
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
    vinv_ = v_.inverse();
  }

  // modal coordinates of a state, fixed per no-jump segment
  ComplexVector modal(const ComplexVector &psi) const { return vinv_ * psi; }

  ComplexVector at(const ComplexVector &phi, double dt) const {
    ComplexVector scaled(phi.size());
    for (Eigen::Index k = 0; k < phi.size(); ++k)
      scaled(k) = phi(k) * std::exp(lambda_(k) * dt);
    return v_ * scaled;
  }

private:
  ComplexVector lambda_;
  ComplexMatrix v_;
  ComplexMatrix vinv_;
};

} // namespace

std::vector<TimeTagStream> simulate_timetags(
    const LindbladGenerator &gen, const std::vector<CollectionOp> &collection,
    double duration_ns, std::uint64_t seed) {
  if (duration_ns <= 0.0)
    throw InvalidParameterError("duration must be positive");
  for (const auto &c : collection)
    if (c.efficiency < 0.0 || c.efficiency > 1.0)
      throw InvalidParameterError("efficiency must lie in [0, 1]");

  // attach collection ops to their collapse channels
  std::vector<Channel> channels;
  for (const auto &ch : gen.collapse_ops()) {
    if (ch.rate_per_ns <= 0.0)
      continue;
    channels.push_back({ch.op, ch.rate_per_ns, {}});
  }
  for (std::size_t ci = 0; ci < collection.size(); ++ci) {
    bool matched = false;
    for (auto &ch : channels) {
      if (ch.op.rows() == collection[ci].op.rows() &&
          (ch.op - collection[ci].op).cwiseAbs().maxCoeff() < 1e-12) {
        double cum = ch.detectors.empty() ? 0.0 : ch.detectors.back().second;
        cum += collection[ci].efficiency;
        if (cum > 1.0 + 1e-12)
          throw InvalidParameterError(
              "efficiencies on one channel exceed 1");
        ch.detectors.push_back({static_cast<int>(ci), cum});
        matched = true;
        break;
      }
    }
    if (!matched)
      throw InvalidParameterError(
          "collection operator matches no collapse channel");
  }

  std::vector<TimeTagStream> streams(collection.size());
  for (std::size_t ci = 0; ci < collection.size(); ++ci) {
    streams[ci].detector_id = static_cast<int>(ci);
    streams[ci].duration_ns = duration_ns;
  }
  if (channels.empty())
    return streams;

  NoJumpPropagator prop(gen);
  CounterRng rng(seed);
  const int d = gen.dim();
  ComplexVector psi = ComplexVector::Zero(d);
  psi(0) = 1.0;

  // rough decay-rate bound for the initial trial step
  double rate_bound = 0.0;
  for (const auto &ch : channels)
    rate_bound += ch.rate * ch.op.squaredNorm();
  const double step0 = std::min(0.1 / std::max(rate_bound, 1e-6), duration_ns);

  double t = 0.0;
  double r = rng.uniform();
  ComplexVector phi = prop.modal(psi);
  while (t < duration_ns) {
    // grow the step until the survival probability drops below r
    double lo = 0.0, hi = step0;
    bool jumped = false;
    while (true) {
      if (t + hi >= duration_ns) {
        hi = duration_ns - t;
        if (prop.at(phi, hi).squaredNorm() > r)
          break; // survives to the end of the run
        jumped = true;
        break;
      }
      double n_hi = prop.at(phi, hi).squaredNorm();
      if (n_hi <= r) {
        jumped = true;
        break;
      }
      lo = hi;
      hi *= 2.0;
    }
    if (!jumped) {
      break;
    }
    // bisect the crossing to the tag resolution
    while (hi - lo > kJumpTimeResolution_ns) {
      double mid = 0.5 * (lo + hi);
      if (prop.at(phi, mid).squaredNorm() > r)
        lo = mid;
      else
        hi = mid;
    }
    const double t_jump = t + hi;
    ComplexVector psi_pre = prop.at(phi, hi);

    // pick the jump channel
    std::vector<double> weights(channels.size());
    double wsum = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      weights[k] = channels[k].rate * (channels[k].op * psi_pre).squaredNorm();
      wsum += weights[k];
    }
    std::size_t k = 0;
    if (wsum > 0.0) {
      double u = rng.uniform() * wsum;
      double acc = 0.0;
      for (; k < channels.size(); ++k) {
        acc += weights[k];
        if (u <= acc)
          break;
      }
      if (k == channels.size())
        k = channels.size() - 1;
    }

    if (!channels[k].detectors.empty()) {
      double u = rng.uniform();
      for (const auto &[det, cum] : channels[k].detectors) {
        if (u <= cum) {
          streams[det].tags_ns.push_back(t_jump);
          break;
        }
      }
    }

    ComplexVector psi_post = channels[k].op * psi_pre;
    double n = psi_post.norm();
    if (n <= 0.0)
      throw IntegrationFailure("jump into null state", t_jump);
    psi = psi_post / n;
    phi = prop.modal(psi);
    t = t_jump;
    r = rng.uniform();
  }
  return streams;
}

TimeTagStream poisson_stream(double rate_per_ns, double duration_ns,
                             std::uint64_t seed, int detector_id) {
  if (rate_per_ns < 0.0 || duration_ns <= 0.0)
    throw InvalidParameterError("rate >= 0 and duration > 0 required");
  TimeTagStream s;
  s.detector_id = detector_id;
  s.duration_ns = duration_ns;
  if (rate_per_ns == 0.0)
    return s;
  CounterRng rng(seed);
  double t = rng.exponential(rate_per_ns);
  while (t < duration_ns) {
    s.tags_ns.push_back(t);
    t += rng.exponential(rate_per_ns);
  }
  return s;
}

CorrelationFunction g2_from_timetags(const TimeTagStream &a,
                                     const TimeTagStream &b,
                                     double bin_width_ns, double max_tau_ns) {
  if (bin_width_ns <= 0.0)
    throw InvalidParameterError("bin width must be positive");
  if (max_tau_ns < bin_width_ns)
    throw InvalidParameterError("max tau must be at least one bin");
  if (a.tags_ns.empty() || b.tags_ns.empty())
    throw NormalizationError("cannot normalize g2 of an empty stream");

  const int n_bins =
      2 * static_cast<int>(std::ceil(max_tau_ns / bin_width_ns));
  const double half_span = 0.5 * n_bins * bin_width_ns;
  std::vector<double> counts(n_bins, 0.0);

  // sweep all pairs with |tb - ta| <= half_span
  std::size_t lo = 0;
  for (double ta : a.tags_ns) {
    while (lo < b.tags_ns.size() && b.tags_ns[lo] < ta - half_span)
      ++lo;
    for (std::size_t j = lo; j < b.tags_ns.size(); ++j) {
      const double tau = b.tags_ns[j] - ta;
      if (tau > half_span)
        break;
      int bin = static_cast<int>(std::floor((tau + half_span) / bin_width_ns));
      if (bin >= 0 && bin < n_bins)
        counts[bin] += 1.0;
    }
  }

  const double duration = std::max(a.duration_ns, b.duration_ns);
  const double norm =
      a.rate_per_ns() * b.rate_per_ns() * bin_width_ns * duration;
  CorrelationFunction cf;
  cf.normalization_per_bin = norm;
  cf.counts = counts;
  cf.taus_ns.reserve(n_bins);
  cf.g2.reserve(n_bins);
  for (int i = 0; i < n_bins; ++i) {
    cf.taus_ns.push_back(-half_span + (i + 0.5) * bin_width_ns);
    cf.g2.push_back(counts[i] / norm);
  }
  return cf;
}

TimeTagStream add_background_and_jitter(const TimeTagStream &stream,
                                        double background_rate_per_ns,
                                        double jitter_sigma_ns,
                                        std::uint64_t seed) {
  if (background_rate_per_ns < 0.0 || jitter_sigma_ns < 0.0)
    throw InvalidParameterError("background rate and jitter must be >= 0");
  TimeTagStream out;
  out.detector_id = stream.detector_id;
  out.duration_ns = stream.duration_ns;
  out.tags_ns = stream.tags_ns;

  CounterRng rng(seed);
  if (background_rate_per_ns > 0.0) {
    CounterRng bg = rng.split(1);
    double t = bg.exponential(background_rate_per_ns);
    while (t < stream.duration_ns) {
      out.tags_ns.push_back(t);
      t += bg.exponential(background_rate_per_ns);
    }
  }
  if (jitter_sigma_ns > 0.0) {
    CounterRng jit = rng.split(2);
    std::vector<double> jittered;
    jittered.reserve(out.tags_ns.size());
    for (double t : out.tags_ns) {
      double tj = t + jitter_sigma_ns * jit.normal();
      if (tj >= 0.0 && tj <= stream.duration_ns)
        jittered.push_back(tj);
    }
    out.tags_ns = std::move(jittered);
  }
  std::sort(out.tags_ns.begin(), out.tags_ns.end());
  return out;
}

} // namespace wgqed
