#pragma once

// Nonlinear least squares (Levenberg-Marquardt on Eigen) and the fit
// models used throughout: Lorentzian, four-Lorentzian PL, exponential,
// saturation, damped Rabi, cubic linewidth, Fano.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgqed/errors.hpp"

namespace wgqed {

struct ParamSpec {
  std::string name;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct FitModel {
  std::string name;
  std::vector<ParamSpec> params;
  // pointwise model value
  std::function<double(const Eigen::VectorXd &, double)> eval;
  // data-driven starting point
  std::function<Eigen::VectorXd(const std::vector<double> &,
                                const std::vector<double> &)>
      initial_guess;
  // optional post-fit relabeling (e.g. peak ordering), applied to the
  // parameters and, consistently, the covariance
  std::function<void(Eigen::VectorXd &, Eigen::MatrixXd &)> canonicalize;

  Eigen::VectorXd predict_at(const Eigen::VectorXd &p,
                             const std::vector<double> &x) const {
    Eigen::VectorXd out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = eval(p, x[i]);
    return out;
  }
};

struct FitResult {
  Eigen::VectorXd parameters;
  Eigen::VectorXd uncertainties; // sqrt of covariance diagonal
  Eigen::MatrixXd covariance;
  double reduced_chi_square = 0.0;
  bool converged = false;
  int iterations = 0;

  double param(const FitModel &m, const std::string &name) const;
  double sigma(const FitModel &m, const std::string &name) const;
};

struct FitOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-8;
  double step_tol = 1e-12;
};

FitResult fit(const FitModel &model, const std::vector<double> &x,
              const std::vector<double> &y,
              const std::optional<std::vector<double>> &sigma = std::nullopt,
              const std::optional<Eigen::VectorXd> &init = std::nullopt,
              const FitOptions &opts = {});

// d f(p, x_i) / d p_j by central differences, step max(1e-7|p|, 1e-10).
Eigen::MatrixXd numeric_jacobian(const FitModel &model,
                                 const Eigen::VectorXd &params,
                                 const std::vector<double> &x);

// offset + amplitude (w/2)^2 / ((x-c)^2 + (w/2)^2)
FitModel model_lorentzian();
// offset + four Lorentzian peaks; centers kept ascending
FitModel model_four_lorentzian();
// offset + amplitude exp(-x/tau)
FitModel model_exponential();
// rate_inf * x / (x + x_sat)
FitModel model_saturation();
// offset + amplitude exp(-gamma x) cos(2 pi f x + phase)
FitModel model_damped_rabi();
// a + b (T - T0)^3
FitModel model_cubic_linewidth();
// offset + [A (w/2)^2 + B (w/2)(x-c)] / ((x-c)^2 + (w/2)^2)
FitModel model_fano();

// lookup by the names above ("lorentzian", "four_lorentzian", ...)
FitModel fit_model_by_name(const std::string &name);
std::vector<std::string> fit_model_names();

} // namespace wgqed
