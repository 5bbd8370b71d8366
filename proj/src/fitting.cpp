#include "wgqed/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace wgqed {

double FitResult::param(const FitModel &m, const std::string &name) const {
  for (std::size_t i = 0; i < m.params.size(); ++i)
    if (m.params[i].name == name)
      return parameters(static_cast<Eigen::Index>(i));
  throw FitError("unknown parameter: " + name);
}

double FitResult::sigma(const FitModel &m, const std::string &name) const {
  for (std::size_t i = 0; i < m.params.size(); ++i)
    if (m.params[i].name == name)
      return uncertainties(static_cast<Eigen::Index>(i));
  throw FitError("unknown parameter: " + name);
}

Eigen::MatrixXd numeric_jacobian(const FitModel &model,
                                 const Eigen::VectorXd &params,
                                 const std::vector<double> &x) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index p = params.size();
  Eigen::MatrixXd J(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = std::max(1e-7 * std::abs(params(j)), 1e-10);
    Eigen::VectorXd pp = params, pm = params;
    pp(j) += h;
    pm(j) -= h;
    for (Eigen::Index i = 0; i < n; ++i)
      J(i, j) = (model.eval(pp, x[i]) - model.eval(pm, x[i])) / (2.0 * h);
  }
  return J;
}

namespace {

Eigen::VectorXd clamp_to_bounds(const FitModel &model, Eigen::VectorXd p) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    p(j) = std::clamp(p(j), model.params[j].lower, model.params[j].upper);
  }
  return p;
}

// Apply a step without letting any parameter jump all the way onto a
// bound: an overshoot lands at 10% of the previous distance instead, so
// scale parameters (widths, times) can recover from a bad step.
Eigen::VectorXd bounded_step(const FitModel &model, const Eigen::VectorXd &p,
                             const Eigen::VectorXd &step) {
  Eigen::VectorXd out = p + step;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double lo = model.params[j].lower;
    const double hi = model.params[j].upper;
    if (out(j) < lo)
      out(j) = (p(j) > lo) ? lo + 0.1 * (p(j) - lo) : lo;
    if (out(j) > hi)
      out(j) = (p(j) < hi) ? hi - 0.1 * (hi - p(j)) : hi;
  }
  return out;
}

} // namespace

FitResult fit(const FitModel &model, const std::vector<double> &x,
              const std::vector<double> &y,
              const std::optional<std::vector<double>> &sigma,
              const std::optional<Eigen::VectorXd> &init,
              const FitOptions &opts) {
  if (x.size() != y.size())
    throw InvalidParameterError("x and y lengths differ");
  if (sigma && sigma->size() != x.size())
    throw InvalidParameterError("sigma length differs from data");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index np = static_cast<Eigen::Index>(model.params.size());
  if (n <= np)
    throw InvalidParameterError(
        "need at least one more data point than parameters");

  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (sigma)
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((*sigma)[i] <= 0.0)
        throw InvalidParameterError("sigma values must be positive");
      w(i) = 1.0 / (*sigma)[i];
    }

  Eigen::VectorXd p =
      clamp_to_bounds(model, init ? *init : model.initial_guess(x, y));

  auto residuals = [&](const Eigen::VectorXd &pp) {
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    return (yv - model.predict_at(pp, x)).cwiseProduct(w).eval();
  };

  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < opts.max_iterations; ++iter) {
    Eigen::MatrixXd J = numeric_jacobian(model, p, x);
    for (Eigen::Index i = 0; i < n; ++i)
      J.row(i) *= w(i);
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;

    if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
      converged = true;
      break;
    }

    // singular Jacobian check before damping masks it
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(JtJ);
    const double smax = svd.singularValues()(0);
    if (smax <= 0.0 || svd.singularValues()(np - 1) < 1e-14 * smax) {
      if (lambda > 1e6) {
        int weak = 0;
        double smin = svd.singularValues()(np - 1);
        for (Eigen::Index j = 0; j < np; ++j)
          if (svd.singularValues()(j) < 1e-12 * std::max(smax, 1.0))
            ++weak;
        throw FitError("rank-deficient Jacobian (" + std::to_string(weak) +
                       " unidentifiable direction(s), smin=" +
                       std::to_string(smin) +
                       "); fix or remove degenerate parameters");
      }
    }

    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index j = 0; j < np; ++j)
        A(j, j) += lambda * std::max(JtJ(j, j), 1e-12);
      Eigen::VectorXd step = A.ldlt().solve(g);
      Eigen::VectorXd p_new = bounded_step(model, p, step);
      Eigen::VectorXd r_new = residuals(p_new);
      double cost_new = r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < cost) {
        const double step_norm = (p_new - p).norm();
        const double reduction = cost - cost_new;
        p = std::move(p_new);
        r = std::move(r_new);
        cost = cost_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step_norm < opts.step_tol * (1.0 + p.norm()) ||
            reduction < 1e-10 * std::max(cost, 1e-300))
          converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12)
        break;
    }
    if (!accepted || converged)
      break;
  }

  // covariance from the final weighted Jacobian
  Eigen::MatrixXd J = numeric_jacobian(model, p, x);
  for (Eigen::Index i = 0; i < n; ++i)
    J.row(i) *= w(i);
  Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::MatrixXd cov =
      JtJ.completeOrthogonalDecomposition().pseudoInverse();

  const double dof = static_cast<double>(n - np);
  const double red_chi2 = cost / dof;
  // without measurement errors, scale uncertainties by the residual level
  if (!sigma)
    cov *= red_chi2;
  cov = 0.5 * (cov + cov.transpose().eval());

  if (model.canonicalize)
    model.canonicalize(p, cov);

  FitResult res;
  res.parameters = p;
  res.covariance = cov;
  res.uncertainties = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  res.reduced_chi_square = red_chi2;
  res.converged = converged;
  res.iterations = iter;
  return res;
}

FitModel model_lorentzian() {
  FitModel m;
  m.name = "lorentzian";
  m.params = {{"offset"}, {"amplitude"}, {"center"}, {"fwhm", 1e-300}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    const double hw = p(3) / 2.0;
    const double dx = x - p(2);
    return p(0) + p(1) * hw * hw / (dx * dx + hw * hw);
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    const std::size_t imax = std::distance(y.begin(), mx);
    const std::size_t imin = std::distance(y.begin(), mn);
    const double span =
        std::abs(x.back() - x.front());
    Eigen::VectorXd p(4);
    // peak or dip, whichever deviates more from the edges
    const double edge = 0.5 * (y.front() + y.back());
    const bool dip = (edge - *mn) > (*mx - edge);
    if (dip) {
      p << edge, *mn - edge, x[imin], span / 6.0;
    } else {
      p << edge, *mx - edge, x[imax], span / 6.0;
    }
    return p;
  };
  return m;
}

FitModel model_four_lorentzian() {
  FitModel m;
  m.name = "four_lorentzian";
  m.params = {{"offset"}};
  for (int k = 1; k <= 4; ++k) {
    m.params.push_back({"amplitude" + std::to_string(k), 0.0});
    m.params.push_back({"center" + std::to_string(k)});
    m.params.push_back({"fwhm" + std::to_string(k), 1e-300});
  }
  m.eval = [](const Eigen::VectorXd &p, double x) {
    double v = p(0);
    for (int k = 0; k < 4; ++k) {
      const double hw = p(3 + 3 * k) / 2.0;
      const double dx = x - p(2 + 3 * k);
      v += p(1 + 3 * k) * hw * hw / (dx * dx + hw * hw);
    }
    return v;
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    // greedy peak picking: take the four largest well-separated samples
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
    const double span = std::abs(x.back() - x.front());
    const double min_sep = span / 20.0;
    std::vector<std::size_t> peaks;
    for (std::size_t idx : order) {
      bool far = true;
      for (std::size_t pk : peaks)
        if (std::abs(x[idx] - x[pk]) < min_sep)
          far = false;
      if (far)
        peaks.push_back(idx);
      if (peaks.size() == 4)
        break;
    }
    while (peaks.size() < 4)
      peaks.push_back(peaks.back());
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    const double base = *std::min_element(y.begin(), y.end());
    Eigen::VectorXd p(13);
    p(0) = base;
    for (int k = 0; k < 4; ++k) {
      p(1 + 3 * k) = y[peaks[k]] - base;
      p(2 + 3 * k) = x[peaks[k]];
      p(3 + 3 * k) = span / 30.0;
    }
    return p;
  };
  // ascending peak centers remove the label-permutation degeneracy
  m.canonicalize = [](Eigen::VectorXd &p, Eigen::MatrixXd &cov) {
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p(2 + 3 * a) < p(2 + 3 * b); });
    Eigen::VectorXi perm(13);
    perm(0) = 0;
    for (int k = 0; k < 4; ++k)
      for (int f = 0; f < 3; ++f)
        perm(1 + 3 * k + f) = 1 + 3 * order[k] + f;
    Eigen::VectorXd p2(13);
    Eigen::MatrixXd c2(13, 13);
    for (int i = 0; i < 13; ++i) {
      p2(i) = p(perm(i));
      for (int j = 0; j < 13; ++j)
        c2(i, j) = cov(perm(i), perm(j));
    }
    p = p2;
    cov = c2;
  };
  return m;
}

FitModel model_exponential() {
  FitModel m;
  m.name = "exponential";
  m.params = {{"offset"}, {"amplitude"}, {"tau", 1e-300}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    return p(0) + p(1) * std::exp(-x / p(2));
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    Eigen::VectorXd p(3);
    const double tail = y.back();
    p << tail, y.front() - tail,
        std::max(std::abs(x.back() - x.front()) / 3.0, 1e-6);
    return p;
  };
  return m;
}

FitModel model_saturation() {
  FitModel m;
  m.name = "saturation";
  m.params = {{"rate_inf", 0.0}, {"x_sat", 1e-300}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    return p(0) * x / (x + p(1));
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    const double ymax = *std::max_element(y.begin(), y.end());
    const double xmax = *std::max_element(x.begin(), x.end());
    Eigen::VectorXd p(2);
    p << 1.2 * ymax, 0.3 * xmax;
    return p;
  };
  return m;
}

FitModel model_damped_rabi() {
  FitModel m;
  m.name = "damped_rabi";
  m.params = {{"offset"}, {"amplitude"}, {"gamma", 0.0},
              {"frequency", 0.0}, {"phase"}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    return p(0) + p(1) * std::exp(-p(2) * x) *
                      std::cos(2.0 * std::numbers::pi * p(3) * x + p(4));
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    // dominant frequency from a DFT over the (near-uniform) grid
    const std::size_t n = x.size();
    const double mean =
        std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double span = x.back() - x.front();
    double best_f = 1.0 / std::max(span, 1e-12), best_pow = 0.0;
    const std::size_t nf = 4 * n;
    for (std::size_t k = 1; k < nf / 2; ++k) {
      const double f = static_cast<double>(k) / (4.0 * span);
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += (y[i] - mean) *
               std::exp(std::complex<double>(
                   0.0, -2.0 * std::numbers::pi * f * x[i]));
      const double pw = std::norm(acc);
      if (pw > best_pow) {
        best_pow = pw;
        best_f = f;
      }
    }
    // envelope decay from log of the peak deviations
    double amp0 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      amp0 = std::max(amp0, std::abs(y[i] - mean));
    double gamma0 = 1.0 / std::max(span, 1e-12);
    {
      // regress log|y - mean| maxima over thirds of the trace
      const std::size_t third = n / 3;
      auto seg_max = [&](std::size_t lo, std::size_t hi) {
        double v = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
          v = std::max(v, std::abs(y[i] - mean));
        return v;
      };
      const double a1 = seg_max(0, third);
      const double a3 = seg_max(2 * third, n);
      if (a1 > 0.0 && a3 > 0.0 && a3 < a1) {
        const double t1 = x[third / 2];
        const double t3 = x[2 * third + (n - 2 * third) / 2];
        gamma0 = std::log(a1 / a3) / (t3 - t1);
      }
    }
    Eigen::VectorXd p(5);
    p << mean, amp0, std::max(gamma0, 0.0), best_f,
        (y.front() > mean ? 0.0 : std::numbers::pi);
    return p;
  };
  return m;
}

FitModel model_cubic_linewidth() {
  FitModel m;
  m.name = "cubic_linewidth";
  m.params = {{"a"}, {"b"}, {"t0"}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    const double dt = x - p(2);
    return p(0) + p(1) * dt * dt * dt;
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    Eigen::VectorXd p(3);
    const double dx = x.back() - x.front();
    const double slope3 =
        (y.back() - y.front()) / std::max(dx * dx * dx, 1e-12);
    p << y.front(), slope3, 0.0;
    return p;
  };
  return m;
}

FitModel model_fano() {
  FitModel m;
  m.name = "fano";
  m.params = {{"offset"}, {"symmetric"}, {"dispersive"}, {"center"},
              {"fwhm", 1e-300}};
  m.eval = [](const Eigen::VectorXd &p, double x) {
    const double hw = p(4) / 2.0;
    const double dx = x - p(3);
    return p(0) + (p(1) * hw * hw + p(2) * hw * dx) / (dx * dx + hw * hw);
  };
  m.initial_guess = [](const std::vector<double> &x,
                       const std::vector<double> &y) {
    auto lor = model_lorentzian();
    Eigen::VectorXd l = lor.initial_guess(x, y);
    Eigen::VectorXd p(5);
    p << l(0), l(1), 0.0, l(2), l(3);
    return p;
  };
  return m;
}

FitModel fit_model_by_name(const std::string &name) {
  if (name == "lorentzian")
    return model_lorentzian();
  if (name == "four_lorentzian")
    return model_four_lorentzian();
  if (name == "exponential")
    return model_exponential();
  if (name == "saturation")
    return model_saturation();
  if (name == "damped_rabi")
    return model_damped_rabi();
  if (name == "cubic_linewidth")
    return model_cubic_linewidth();
  if (name == "fano")
    return model_fano();
  throw FitError("unknown fit model: " + name);
}

std::vector<std::string> fit_model_names() {
  return {"lorentzian",  "four_lorentzian", "exponential", "saturation",
          "damped_rabi", "cubic_linewidth", "fano"};
}

} // namespace wgqed
