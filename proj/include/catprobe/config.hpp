#ifndef CATPROBE_CONFIG_HPP
#define CATPROBE_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "catprobe/params.hpp"

namespace catprobe {

// Thrown for malformed configuration or command lines; the driver maps it to
// exit code 1. Numerical failures propagate as std::runtime_error (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode {
  alpha_circle,
  state,
  purity_vs_y,
  p_of_y,
  np_vs_y,
  squeezed_scatter,
  oracle_validate,
  symmetry_check,
};

inline Mode mode_from_string(const std::string& s) {
  if (s == "alpha-circle") return Mode::alpha_circle;
  if (s == "state") return Mode::state;
  if (s == "purity-vs-y") return Mode::purity_vs_y;
  if (s == "p-of-y") return Mode::p_of_y;
  if (s == "np-vs-y") return Mode::np_vs_y;
  if (s == "squeezed-scatter") return Mode::squeezed_scatter;
  if (s == "oracle-validate") return Mode::oracle_validate;
  if (s == "symmetry-check") return Mode::symmetry_check;
  throw UsageError("unknown mode '" + s + "'");
}

inline std::string mode_to_string(Mode m) {
  switch (m) {
    case Mode::alpha_circle: return "alpha-circle";
    case Mode::state: return "state";
    case Mode::purity_vs_y: return "purity-vs-y";
    case Mode::p_of_y: return "p-of-y";
    case Mode::np_vs_y: return "np-vs-y";
    case Mode::squeezed_scatter: return "squeezed-scatter";
    case Mode::oracle_validate: return "oracle-validate";
    case Mode::symmetry_check: return "symmetry-check";
  }
  return "?";
}

// One experiment: a mode, physical parameters, and run controls. Frequencies
// are configured in "2 pi x MHz" units and converted here at the boundary.
struct ExperimentSpec {
  Mode mode = Mode::alpha_circle;
  PhysicalParams params = reichel_preset();
  std::optional<double> t;       // probing time, s
  std::optional<double> y;       // target integrated record, s^(1/2)
  double dt_factor = 0.01;       // dt = dt_factor / max rate
  std::optional<double> y_min, y_max;
  int y_count = 81;
  int trajectories = 30;
  int seeds = 10;                // symmetry-check realizations
  long steps = 10000;            // symmetry-check steps
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
  bool probe_off = true;
  int q_theta = 200, q_phi = 400;
};

// The accepted flat key set. Unknown keys are rejected, matching the
// fail-fast contract of the loader.
inline const std::map<std::string, std::string>& config_key_help() {
  static const std::map<std::string, std::string> keys = {
      {"mode", "experiment mode (alpha-circle, state, ...)"},
      {"preset", "named parameter preset; 'reichel' is built in"},
      {"j", "total spin J = N/2 (multiple of 1/2)"},
      {"g_2pi_mhz", "atom-field coupling g / 2pi, MHz"},
      {"delta_2pi_mhz", "detuning / 2pi, MHz"},
      {"kappa1_2pi_mhz", "cavity-1 input mirror rate / 2pi, MHz"},
      {"kappa_loss1_2pi_mhz", "cavity-1 loss rate / 2pi, MHz"},
      {"kappa2_2pi_mhz", "cavity-2 input mirror rate / 2pi, MHz"},
      {"kappa_loss2_2pi_mhz", "cavity-2 loss rate / 2pi, MHz"},
      {"gamma_2pi_mhz", "atomic decay rate / 2pi, MHz"},
      {"eta", "detection efficiency in [0, 1]"},
      {"phi", "local oscillator phase, rad"},
      {"beta_re", "drive amplitude, real part, s^-1/2"},
      {"beta_im", "drive amplitude, imaginary part, s^-1/2"},
      {"drive_ratio", "sets |beta| from 4 kappa1 beta^2 / kappa^2"},
      {"epsilon_re", "squeezing gain, real part, rad/s"},
      {"epsilon_im", "squeezing gain, imaginary part, rad/s"},
      {"epsilon_im_over_kappa2", "squeezing gain as Im(eps)/kappa2"},
      {"t", "probing time, s"},
      {"y", "integrated record value, s^1/2"},
      {"dt_factor", "time step as a fraction of 1/max-rate"},
      {"y_min", "lower edge of the Y grid"},
      {"y_max", "upper edge of the Y grid"},
      {"y_count", "number of Y grid points"},
      {"trajectories", "trajectories per series"},
      {"seeds", "number of noise realizations (symmetry-check)"},
      {"steps", "steps per realization (symmetry-check)"},
      {"seed", "base RNG seed; trajectory k uses seed + k"},
      {"out_dir", "output directory"},
      {"probe_off", "drop the field overlap factor (0/1)"},
      {"q_theta", "Q-function polar grid size"},
      {"q_phi", "Q-function azimuthal grid size"},
  };
  return keys;
}

inline void apply_key(ExperimentSpec& spec, const std::string& key,
                      const std::string& value, const std::string& where) {
  auto as_double = [&]() {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw UsageError(where + ": bad numeric value '" + value + "' for key '" + key + "'");
    }
  };
  if (key == "mode") {
    spec.mode = mode_from_string(value);
  } else if (key == "preset") {
    if (value != "reichel") throw UsageError(where + ": unknown preset '" + value + "'");
    spec.params = reichel_preset();
  } else if (key == "j") {
    spec.params.big_j = as_double();
  } else if (key == "g_2pi_mhz") {
    spec.params.g = mhz_2pi(as_double());
  } else if (key == "delta_2pi_mhz") {
    spec.params.delta = mhz_2pi(as_double());
  } else if (key == "kappa1_2pi_mhz") {
    spec.params.kappa1 = mhz_2pi(as_double());
  } else if (key == "kappa_loss1_2pi_mhz") {
    spec.params.kappa_loss1 = mhz_2pi(as_double());
  } else if (key == "kappa2_2pi_mhz") {
    spec.params.kappa2 = mhz_2pi(as_double());
  } else if (key == "kappa_loss2_2pi_mhz") {
    spec.params.kappa_loss2 = mhz_2pi(as_double());
  } else if (key == "gamma_2pi_mhz") {
    spec.params.gamma_sp = mhz_2pi(as_double());
  } else if (key == "eta") {
    spec.params.eta = as_double();
  } else if (key == "phi") {
    spec.params.phi = as_double();
  } else if (key == "beta_re") {
    spec.params.beta = cd(as_double(), spec.params.beta.imag());
  } else if (key == "beta_im") {
    spec.params.beta = cd(spec.params.beta.real(), as_double());
  } else if (key == "drive_ratio") {
    spec.params.set_drive_ratio(as_double());
  } else if (key == "epsilon_re") {
    spec.params.epsilon = cd(as_double(), spec.params.epsilon.imag());
  } else if (key == "epsilon_im") {
    spec.params.epsilon = cd(spec.params.epsilon.real(), as_double());
  } else if (key == "epsilon_im_over_kappa2") {
    spec.params.epsilon = cd(spec.params.epsilon.real(), as_double() * spec.params.kappa2);
  } else if (key == "t") {
    spec.t = as_double();
  } else if (key == "y") {
    spec.y = as_double();
  } else if (key == "dt_factor") {
    spec.dt_factor = as_double();
  } else if (key == "y_min") {
    spec.y_min = as_double();
  } else if (key == "y_max") {
    spec.y_max = as_double();
  } else if (key == "y_count") {
    spec.y_count = static_cast<int>(as_double());
  } else if (key == "trajectories") {
    spec.trajectories = static_cast<int>(as_double());
  } else if (key == "seeds") {
    spec.seeds = static_cast<int>(as_double());
  } else if (key == "steps") {
    spec.steps = static_cast<long>(as_double());
  } else if (key == "seed") {
    spec.seed = static_cast<std::uint64_t>(as_double());
  } else if (key == "out_dir") {
    spec.out_dir = value;
  } else if (key == "probe_off") {
    spec.probe_off = (value == "1" || value == "true");
  } else if (key == "q_theta") {
    spec.q_theta = static_cast<int>(as_double());
  } else if (key == "q_phi") {
    spec.q_phi = static_cast<int>(as_double());
  } else {
    throw UsageError(where + ": unknown key '" + key + "'");
  }
}

// Flat key = value configuration file; '#' starts a comment. Unknown keys are
// errors with the offending line number.
inline void load_config_file(ExperimentSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = line.find_first_not_of(" \t\r\n");
    if (notspace == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      const auto e = s.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_key(spec, key, value, path + ":" + std::to_string(lineno));
  }
}

// Merge order: preset defaults, then the config file, then command-line
// overrides (given as key=value strings); later wins.
inline ExperimentSpec load_spec(const std::optional<std::string>& config_path,
                                const std::vector<std::string>& overrides) {
  ExperimentSpec spec;
  if (config_path) load_config_file(spec, *config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw UsageError("override '" + kv + "' is not of the form key=value");
    apply_key(spec, kv.substr(0, eq), kv.substr(eq + 1), "command line");
  }
  return spec;
}

inline double require_t(const ExperimentSpec& spec) {
  if (!spec.t) throw UsageError("mode " + mode_to_string(spec.mode) + " requires 't'");
  return *spec.t;
}

inline double require_y(const ExperimentSpec& spec) {
  if (!spec.y) throw UsageError("mode " + mode_to_string(spec.mode) + " requires 'y'");
  return *spec.y;
}

}  // namespace catprobe

#endif
