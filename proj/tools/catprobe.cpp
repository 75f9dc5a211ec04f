// Experiment driver: reproducible conditional-probing simulations with CSV
// artifacts and JSON provenance sidecars.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "catprobe/analysis.hpp"
#include "catprobe/coherent.hpp"
#include "catprobe/config.hpp"
#include "catprobe/crosscheck.hpp"
#include "catprobe/csvio.hpp"
#include "catprobe/dump.hpp"
#include "catprobe/gaussian.hpp"
#include "catprobe/protocol.hpp"

namespace fs = std::filesystem;
using namespace catprobe;

namespace {

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["mode"] = mode_to_string(spec.mode);
  j["params"] = params_to_json(spec.params);
  j["seed"] = spec.seed;
  j["dt_factor"] = spec.dt_factor;
  if (spec.t) j["t"] = *spec.t;
  if (spec.y) j["y"] = *spec.y;
  if (spec.y_min) j["y_min"] = *spec.y_min;
  if (spec.y_max) j["y_max"] = *spec.y_max;
  j["y_count"] = spec.y_count;
  j["trajectories"] = spec.trajectories;
  j["probe_off"] = spec.probe_off;
  return j;
}

void finish_sidecar(const ExperimentSpec& spec, nlohmann::json extra) {
  nlohmann::json j = spec_to_json(spec);
  j["outputs"] = std::move(extra);
  write_sidecar(fs::path(spec.out_dir) / (mode_to_string(spec.mode) + ".json"), j);
}

// Default Y grid from the record distribution: mean range widened by 4 sigma.
std::pair<double, double> default_y_range(const ExperimentSpec& spec, double t) {
  const double ymax_mean =
      2.0 * std::sqrt(spec.params.eta * spec.params.kappa1) *
      alpha_steady(spec.params, 0.0).real() * t;
  const double pad = 4.0 * std::sqrt(t);
  return {std::min(0.0, ymax_mean) - pad, std::max(0.0, ymax_mean) + pad};
}

int run_alpha_circle(const ExperimentSpec& spec) {
  const auto amps = amplitude_set(spec.params, AmplitudeSet::Mode::steady);
  const auto scales = derive_scales(spec.params, 0.0);
  CsvWriter csv(fs::path(spec.out_dir) / "alpha_circle.csv", {"n", "re_alpha", "im_alpha"});
  double residual = 0.0;
  for (int i = 0; i < amps.dim(); ++i) {
    const cd a = amps.alpha(i);
    csv.row({amps.n_of(i), a.real(), a.imag()});
    residual = std::max(residual,
                        std::abs(std::abs(a - cd(scales.circle_center, 0.0)) -
                                 scales.circle_radius));
  }
  finish_sidecar(spec, {{{"file", "alpha_circle.csv"},
                         {"rows", csv.rows()},
                         {"circle_residual", residual}}});
  std::cout << "alpha-circle: " << csv.rows() << " amplitudes, circle residual "
            << residual << "\n";
  return 0;
}

int run_state(const ExperimentSpec& spec) {
  const double t = require_t(spec);
  const double y = require_y(spec);
  const auto coeffs = AtomicCoefficients::css_x(spec.params.big_j);
  const auto rec = MeasurementRecord::from_integrated(y, t, 64);
  const auto cs = conditional_state(spec.params, coeffs, rec, true, spec.probe_off);

  CsvWriter csv(fs::path(spec.out_dir) / "state_diagonal.csv",
                {"n", "rho_nn", "rho_nn_initial"});
  for (int i = 0; i < cs.rho_at.dim(); ++i)
    csv.row({cs.rho_at.n_of(i), cs.rho_at.rho(i, i).real(), coeffs.c(i, i).real()});

  const auto q = spin_q_function(cs.rho_at, spec.q_theta, spec.q_phi);
  CsvWriter qcsv(fs::path(spec.out_dir) / "state_qfunction.csv", {"theta", "phi", "q"});
  for (int i = 0; i < q.theta.size(); ++i)
    for (int k = 0; k < q.phi.size(); ++k)
      qcsv.row({q.theta(i), q.phi(k), q.values(i, k)});

  const auto peak = peak_summary(cs.rho_at);
  finish_sidecar(spec, {{{"file", "state_diagonal.csv"}, {"rows", csv.rows()}},
                        {{"file", "state_qfunction.csv"},
                         {"rows", qcsv.rows()},
                         {"normalization", q.integral()},
                         {"d_over_2", peak.d_over_2},
                         {"single_peaked", peak.single_peaked}}});
  std::cout << "state: d/2 = " << peak.d_over_2 << ", Q normalization "
            << q.integral() << "\n";
  return 0;
}

int run_purity_vs_y(const ExperimentSpec& spec) {
  const double t = require_t(spec);
  const auto coeffs = AtomicCoefficients::css_x(spec.params.big_j);
  auto [ylo, yhi] = default_y_range(spec, t);
  if (spec.y_min) ylo = *spec.y_min;
  if (spec.y_max) yhi = *spec.y_max;
  CsvWriter csv(fs::path(spec.out_dir) / "purity_vs_y.csv", {"y", "purity"});
  for (int i = 0; i < spec.y_count; ++i) {
    const double y = ylo + (yhi - ylo) * i / (spec.y_count - 1);
    const auto rec = MeasurementRecord::from_integrated(y, t, 16);
    csv.row({y, purity_full(spec.params, coeffs, rec, true, spec.probe_off)});
  }
  finish_sidecar(spec, {{{"file", "purity_vs_y.csv"}, {"rows", csv.rows()}}});
  std::cout << "purity-vs-y: " << csv.rows() << " points\n";
  return 0;
}

int run_p_of_y(const ExperimentSpec& spec) {
  const double t = require_t(spec);
  const auto coeffs = AtomicCoefficients::css_x(spec.params.big_j);
  const auto dist = record_probability_y(spec.params, coeffs, t);
  auto [ylo, yhi] = default_y_range(spec, t);
  if (spec.y_min) ylo = *spec.y_min;
  if (spec.y_max) yhi = *spec.y_max;
  CsvWriter csv(fs::path(spec.out_dir) / "p_of_y.csv", {"y", "density"});
  for (int i = 0; i < spec.y_count; ++i) {
    const double y = ylo + (yhi - ylo) * i / (spec.y_count - 1);
    csv.row({y, dist.pdf(y)});
  }
  finish_sidecar(spec, {{{"file", "p_of_y.csv"}, {"rows", csv.rows()}}});
  std::cout << "p-of-y: " << csv.rows() << " points\n";
  return 0;
}

int run_np_vs_y(const ExperimentSpec& spec) {
  const double t = require_t(spec);
  const auto coeffs = AtomicCoefficients::css_x(spec.params.big_j);
  auto [ylo, yhi] = default_y_range(spec, t);
  if (spec.y_min) ylo = *spec.y_min;
  if (spec.y_max) yhi = *spec.y_max;
  CsvWriter csv(fs::path(spec.out_dir) / "np_vs_y.csv",
                {"y", "n_p_direct", "n_p_approx"});
  for (int i = 0; i < spec.y_count; ++i) {
    const double y = ylo + (yhi - ylo) * i / (spec.y_count - 1);
    const auto rec = MeasurementRecord::from_integrated(y, t, 16);
    const auto cs = conditional_state(spec.params, coeffs, rec, true, true);
    const auto peak = peak_summary(cs.rho_at);
    const auto est = peak_estimate(spec.params, spec.params.big_j, t, y);
    csv.row({y, peak.d_over_2_discrete, est.n_p});
  }
  finish_sidecar(spec, {{{"file", "np_vs_y.csv"}, {"rows", csv.rows()}}});
  std::cout << "np-vs-y: " << csv.rows() << " points\n";
  return 0;
}

int run_squeezed_scatter(const ExperimentSpec& spec, bool dump_state) {
  const double t = require_t(spec);
  const PhysicalParams& p = spec.params;
  const int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::vector<TrajectorySummary> batch;
  std::string method;
  if (p.epsilon == cd(0.0, 0.0) && p.kappa2 == 0.0) {
    // coherent-probe reference series via the analytic solution
    method = "analytic";
    batch = run_trajectory_batch(spec.trajectories, spec.seed, threads,
                                 [&](std::uint64_t s) {
                                   return run_coherent_reference_trajectory(p, t, s);
                                 });
  } else {
    method = "gaussian-sde";
    const double dt = spec.dt_factor / max_component_rate(p);
    batch = run_trajectory_batch(spec.trajectories, spec.seed, threads,
                                 [&](std::uint64_t s) {
                                   return run_scatter_trajectory(p, t, dt, s);
                                 });
    if (dump_state) {
      // full-state container for the first trajectory of the batch
      GaussianEnsemble ens;
      run_scatter_trajectory(p, t, dt, spec.seed, {}, nullptr, &ens);
      write_ensemble_dump(ens, fs::path(spec.out_dir) /
                                   ("ensemble_" + std::to_string(spec.seed) + ".json"));
    }
  }
  CsvWriter csv(fs::path(spec.out_dir) / "scatter.csv",
                {"seed", "purity", "d_over_2", "d_over_2_discrete", "y"});
  for (const auto& s : batch)
    csv.row({static_cast<double>(s.seed), s.purity, s.d_over_2, s.d_over_2_discrete,
             s.y_final});
  const auto summary = summarize_series(method, batch);
  finish_sidecar(spec, {{{"file", "scatter.csv"},
                         {"rows", csv.rows()},
                         {"method", method},
                         {"median_purity", summary.median_purity},
                         {"median_d_over_2", summary.median_d_over_2},
                         {"fraction_double_peaked", summary.fraction_double_peaked}}});
  std::cout << "squeezed-scatter (" << method << "): " << batch.size()
            << " trajectories, median purity " << summary.median_purity
            << ", median d/2 " << summary.median_d_over_2 << "\n";
  return 0;
}

int run_oracle_validate(const ExperimentSpec& spec) {
  if (spec.params.big_j > 2.0)
    throw UsageError("oracle-validate runs at J <= 2 only");
  const auto coh = run_coherent_oracle_check(spec.seed);
  const auto sq = run_squeezed_oracle_check(spec.seed);
  nlohmann::json rep;
  rep["coherent"] = {{"max_dev", coh.max_dev},
                     {"max_alpha_dev", coh.max_alpha_dev},
                     {"mode2_deviation", coh.mode2_deviation},
                     {"threshold", 1e-5}};
  rep["squeezed"] = {{"max_dev", sq.max_dev},
                     {"steady_mean_dev_gauss", sq.steady_mean_dev_gauss},
                     {"steady_mean_dev_fock", sq.steady_mean_dev_fock},
                     {"threshold", 1e-4}};
  const bool ok = coh.max_dev < 1e-5 && coh.max_alpha_dev < 1e-6 &&
                  sq.max_dev < 1e-4 && sq.steady_mean_dev_gauss < 1e-6 &&
                  sq.steady_mean_dev_fock < 1e-6;
  rep["pass"] = ok;
  finish_sidecar(spec, rep);
  std::cout << "oracle-validate: coherent dev " << coh.max_dev << ", squeezed dev "
            << sq.max_dev << ", steady means " << sq.steady_mean_dev_gauss << " / "
            << sq.steady_mean_dev_fock << (ok ? " [ok]" : " [FAIL]") << "\n";
  return ok ? 0 : 2;
}

int run_symmetry_check(const ExperimentSpec& spec) {
  const auto rep = run_symmetry_suite(spec.seeds, spec.steps, spec.seed,
                                      std::min(spec.params.big_j, 2.0));
  nlohmann::json j;
  j["residuals"] = rep.residuals;
  j["max_residual"] = rep.max_residual;
  j["broken_residual"] = rep.broken_residual;
  const bool ok = rep.max_residual < 1e-8 && rep.broken_residual > 1e-3;
  j["pass"] = ok;
  finish_sidecar(spec, j);
  std::cout << "symmetry-check: max residual " << rep.max_residual
            << ", broken control " << rep.broken_residual
            << (ok ? " [ok]" : " [FAIL]") << "\n";
  return ok ? 0 : 2;
}

int dispatch(const ExperimentSpec& spec, bool dump_state) {
  const auto report = validate(spec.params);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.ok()) {
    for (const auto& v : report.violations) std::cerr << "invalid parameters: " << v << "\n";
    throw UsageError("parameter validation failed");
  }
  fs::create_directories(spec.out_dir);
  switch (spec.mode) {
    case Mode::alpha_circle: return run_alpha_circle(spec);
    case Mode::state: return run_state(spec);
    case Mode::purity_vs_y: return run_purity_vs_y(spec);
    case Mode::p_of_y: return run_p_of_y(spec);
    case Mode::np_vs_y: return run_np_vs_y(spec);
    case Mode::squeezed_scatter: return run_squeezed_scatter(spec, dump_state);
    case Mode::oracle_validate: return run_oracle_validate(spec);
    case Mode::symmetry_check: return run_symmetry_check(spec);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "catprobe: conditional preparation of collective-spin superposition states "
      "by cavity-enhanced homodyne probing"};
  app.require_subcommand(0, 1);

  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<double> j_flag, t_flag, y_flag, eps_flag;
  std::optional<int> traj_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> out_flag;
  bool dump_state = false;

  app.add_option("--config", config_path, "flat key=value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", overrides,
                 "override any config key, e.g. --set eta=0.9 (repeatable)");
  app.add_option("--j", j_flag, "total spin J = N/2");
  app.add_option("--t", t_flag, "probing time, s");
  app.add_option("--y", y_flag, "integrated record value, s^1/2");
  app.add_option("--epsilon-im-over-kappa2", eps_flag, "Im(epsilon)/kappa2");
  app.add_option("--trajectories", traj_flag, "trajectories per series");
  app.add_option("--seed", seed_flag, "base RNG seed");
  app.add_option("--out", out_flag, "output directory");
  app.add_flag("--dump-state", dump_state,
               "squeezed-scatter: write a full-state container for the first trajectory");
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "print the configuration keys and exit");

  const std::vector<std::pair<std::string, std::string>> modes = {
      {"alpha-circle", "steady cavity amplitudes for n = -J..J"},
      {"state", "conditional atomic state at fixed (t, Y): diagonal and Q-function"},
      {"purity-vs-y", "conditional purity as a function of the integrated record"},
      {"p-of-y", "probability density of the integrated record"},
      {"np-vs-y", "peak position: exact diagonal vs cubic estimator"},
      {"squeezed-scatter", "conditional-preparation protocol scatter (purity vs d/2)"},
      {"oracle-validate", "truncated-basis cross-validation at J = 1"},
      {"symmetry-check", "reflection-symmetry residuals over noise realizations"}};
  for (const auto& [name, desc] : modes) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
    if (list_keys) {
      for (const auto& [key, help] : config_key_help())
        std::printf("%-24s %s\n", key.c_str(), help.c_str());
      return 0;
    }
    if (app.get_subcommands().empty())
      throw UsageError("a mode subcommand is required (see --help)");
    ExperimentSpec spec = load_spec(config_path, overrides);
    spec.mode = mode_from_string(app.get_subcommands().front()->get_name());
    if (j_flag) spec.params.big_j = *j_flag;
    if (t_flag) spec.t = *t_flag;
    if (y_flag) spec.y = *y_flag;
    if (eps_flag) spec.params.epsilon = cd(0.0, *eps_flag * spec.params.kappa2);
    if (traj_flag) spec.trajectories = *traj_flag;
    if (seed_flag) spec.seed = *seed_flag;
    if (out_flag) spec.out_dir = *out_flag;
    return dispatch(spec, dump_state);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
