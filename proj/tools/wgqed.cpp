#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "wgqed/budget.hpp"
#include "wgqed/fitting.hpp"
#include "wgqed/io.hpp"
#include "wgqed/photon_statistics.hpp"
#include "wgqed/runner.hpp"

namespace {

// 0 success, 2 validation, 3 numerical failure, 4 ingestion
int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const wgqed::IngestionError *>(&e))
    return 4;
  if (dynamic_cast<const wgqed::ValidationError *>(&e) ||
      dynamic_cast<const wgqed::InvalidParameterError *>(&e))
    return 2;
  return 3;
}

int cmd_run(const std::string &config_path) {
  wgqed::Config cfg = wgqed::Config::parse_file(config_path);
  auto out_dir = wgqed::resolve_output_dir(cfg);
  wgqed::run_experiment(cfg, out_dir);
  std::cout << "wrote outputs to " << out_dir.string() << "\n";
  return 0;
}

int cmd_fit(const std::string &model_name, const std::string &csv_path,
            const std::string &report_path) {
  const auto names = wgqed::fit_model_names();
  if (std::find(names.begin(), names.end(), model_name) == names.end()) {
    std::string known;
    for (const auto &n : names)
      known += (known.empty() ? "" : ", ") + n;
    throw wgqed::ValidationError("unknown fit model '" + model_name +
                                 "'; available: " + known);
  }
  wgqed::FitModel model = wgqed::fit_model_by_name(model_name);
  wgqed::CsvTable t = wgqed::ingest_csv(csv_path);
  if (t.columns.size() < 2)
    throw wgqed::IngestionError("fit input needs two columns (x, y)");
  wgqed::FitResult res = wgqed::fit(model, t.columns[0], t.columns[1]);

  std::ostringstream rep;
  for (std::size_t i = 0; i < model.params.size(); ++i)
    rep << model.params[i].name << " = "
        << wgqed::format_full_precision(res.parameters(i)) << " +- "
        << wgqed::format_full_precision(res.uncertainties(i)) << "\n";
  rep << "reduced_chi_square = "
      << wgqed::format_full_precision(res.reduced_chi_square) << "\n";
  rep << "converged = " << (res.converged ? "yes" : "no") << "\n";
  rep << "iterations = " << res.iterations << "\n";
  std::cout << rep.str();

  if (!report_path.empty()) {
    wgqed::CsvTable rt;
    rt.headers = {"value", "uncertainty"};
    rt.columns.resize(2);
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      rt.columns[0].push_back(res.parameters(i));
      rt.columns[1].push_back(res.uncertainties(i));
    }
    wgqed::write_csv(report_path, rt);
  }
  return res.converged ? 0 : 3;
}

int cmd_g2(const std::string &tags_a, const std::string &tags_b, double bin_ns,
           double window_ns, const std::string &out_path) {
  wgqed::TimeTagStream a = wgqed::read_timetags(tags_a);
  wgqed::TimeTagStream b = wgqed::read_timetags(tags_b);
  wgqed::CorrelationFunction cf =
      wgqed::g2_from_timetags(a, b, bin_ns, window_ns);
  if (out_path.empty()) {
    std::cout << "tau_ns,g2,counts\n";
    for (std::size_t i = 0; i < cf.taus_ns.size(); ++i)
      std::cout << wgqed::format_full_precision(cf.taus_ns[i]) << ","
                << wgqed::format_full_precision(cf.g2[i]) << ","
                << wgqed::format_full_precision(cf.counts[i]) << "\n";
  } else {
    wgqed::write_correlation_csv(out_path, cf);
  }
  return 0;
}

int cmd_budget(const std::string &config_path) {
  wgqed::Config cfg = wgqed::Config::parse_file(config_path);
  wgqed::PhotonBudget b;
  b.lifetime_ns = cfg.get_double("budget", "lifetime_ns");
  b.zpl_branching = cfg.get_double("budget", "zpl_branching");
  b.waveguide_beta = cfg.get_double("budget", "waveguide_beta");
  b.fiber_coupling = cfg.get_double("budget", "fiber_coupling");
  b.filter_and_detector = cfg.get_double("budget", "filter_and_detector");
  const double exc = cfg.get_double("budget", "excitation_mcps");
  std::cout << "max_photon_flux_mcps = "
            << wgqed::format_full_precision(
                   wgqed::max_photon_flux(b.lifetime_ns))
            << "\n";
  std::cout << "detected_rate_mcps = "
            << wgqed::format_full_precision(wgqed::detected_rate(b, exc))
            << "\n";
  if (cfg.has("budget", "measured_detected_mcps")) {
    std::cout << "waveguide_beta_inferred = "
              << wgqed::format_full_precision(
                     wgqed::waveguide_beta_from_detected(
                         cfg.get_double("budget", "measured_detected_mcps"),
                         exc, b.zpl_branching, b.fiber_coupling,
                         b.filter_and_detector))
              << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"waveguide QED emitter simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path, model_name, csv_path, report_path;
  std::string tags_a, tags_b, g2_out;
  double bin_ns = 0.5, window_ns = 50.0;

  auto *run = app.add_subcommand("run", "run a config-driven experiment");
  run->add_option("config", config_path, "config file")->required();

  auto *fit = app.add_subcommand("fit", "fit a named model to CSV data");
  fit->add_option("model", model_name, "model name")->required();
  fit->add_option("csv", csv_path, "two-column CSV (x, y)")->required();
  fit->add_option("--report", report_path, "also write a CSV report");

  auto *g2 = app.add_subcommand("g2", "correlate two time-tag streams");
  g2->add_option("tags_a", tags_a)->required();
  g2->add_option("tags_b", tags_b)->required();
  g2->add_option("--bin", bin_ns, "bin width in ns");
  g2->add_option("--window", window_ns, "max |tau| in ns");
  g2->add_option("--out", g2_out, "output CSV path");

  auto *budget = app.add_subcommand("budget", "photon budget calculator");
  budget->add_option("config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path);
    if (fit->parsed())
      return cmd_fit(model_name, csv_path, report_path);
    if (g2->parsed())
      return cmd_g2(tags_a, tags_b, bin_ns, window_ns, g2_out);
    if (budget->parsed())
      return cmd_budget(config_path);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
