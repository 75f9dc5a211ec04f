#ifndef CATPROBE_PARAMS_HPP
#define CATPROBE_PARAMS_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "catprobe/units.hpp"

namespace catprobe {

// Experimental constants for one probing setup. All frequencies and rates are
// angular (rad/s); beta carries s^(-1/2) so |beta|^2 dt is a photon number.
//
// Conventions:
//  - The analytic (coherent-probe) module takes beta real: x-quadrature
//    detection of a real drive.
//  - The cascaded-cavity modules (gaussian, fock) use the master-equation
//    phase convention in which a drive beta enters the mode-1 equation as
//    i*sqrt(kappa1)*beta, so the real-beta analytic setup corresponds to a
//    purely imaginary beta there (see crosscheck.hpp).
struct PhysicalParams {
  double g = 0.0;            // single-atom coupling (rad/s)
  double delta = 1.0;        // detuning (rad/s), nonzero
  double kappa1 = 0.0;       // cavity-1 input-mirror decay rate
  double kappa_loss1 = 0.0;  // cavity-1 loss rate
  double kappa2 = 0.0;       // cavity-2 input-mirror decay rate (0 = no squeezing cavity)
  double kappa_loss2 = 0.0;  // cavity-2 loss rate
  cd beta{0.0, 0.0};         // input-beam amplitude, s^(-1/2)
  cd epsilon{0.0, 0.0};      // nonlinear gain of the squeezing crystal (rad/s)
  double eta = 1.0;          // detection efficiency in [0,1]
  double phi = pi;           // local-oscillator phase
  double gamma_sp = 0.0;     // atomic decay rate, used only in estimates
  double big_j = 0.0;        // total spin J = N/2, nonnegative multiple of 1/2

  double g_tilde() const { return g * g / delta; }
  double kappa() const { return kappa1 + kappa_loss1; }
  double kappa_c() const { return kappa2 + kappa_loss2; }
  double n_atoms() const { return 2.0 * big_j; }
  int dim() const { return static_cast<int>(std::lround(2.0 * big_j)) + 1; }
  // n value of basis index i, i in [0, dim)
  double n_of(int i) const { return static_cast<double>(i) - big_j; }
  int index_of(double n) const { return static_cast<int>(std::lround(n + big_j)); }

  // 4 kappa1 |beta|^2 / kappa^2, the on-resonance intracavity photon number
  // of the empty cavity. 0.01 for the standard parameter set.
  double drive_ratio() const {
    const double k = kappa();
    return 4.0 * kappa1 * std::norm(beta) / (k * k);
  }

  // Set |beta| (real, positive) from a target drive ratio.
  void set_drive_ratio(double ratio) {
    beta = cd(std::sqrt(ratio * kappa() * kappa() / (4.0 * kappa1)), 0.0);
  }
};

// The strong-coupling cavity QED parameter set used for all standard runs:
// g = 2pi x 215 MHz, Delta = 2pi x 10 GHz, kappa1 = kappa = 2pi x 106 MHz,
// 4 kappa1 beta^2/kappa^2 = 0.01, eta = 1, Gamma = 2pi x 6 MHz, J = 100.
inline PhysicalParams reichel_preset() {
  PhysicalParams p;
  p.g = mhz_2pi(215.0);
  p.delta = ghz_2pi(10.0);
  p.kappa1 = mhz_2pi(106.0);
  p.kappa_loss1 = 0.0;
  p.kappa2 = 0.0;
  p.kappa_loss2 = 0.0;
  p.eta = 1.0;
  p.phi = pi;
  p.gamma_sp = mhz_2pi(6.0);
  p.big_j = 100.0;
  p.epsilon = cd(0.0, 0.0);
  p.set_drive_ratio(0.01);
  return p;
}

struct DerivedScales {
  double g_tilde = 0.0;
  double kappa_total = 0.0;
  double t_qs = 0.0;           // time for the integrated records of n=0 and n=+-J to separate
  double t_sp = 0.0;           // mean time between spontaneous-emission events
  double circle_center = 0.0;  // = sqrt(kappa1)|beta|/kappa
  double circle_radius = 0.0;  // equals circle_center
};

// n_typical is the |n| used in the excited-state population estimate entering
// t_sp; it must lie in [-J, J]. Zero eta, beta or kappa1 make t_qs infinite
// rather than an error, and likewise for t_sp.
inline DerivedScales derive_scales(const PhysicalParams& p, double n_typical) {
  if (std::abs(n_typical) > p.big_j + 1e-12)
    throw std::invalid_argument("derive_scales: n_typical outside [-J, J]");
  DerivedScales s;
  s.g_tilde = p.g_tilde();
  s.kappa_total = p.kappa();
  const double k = p.kappa();
  const double b2 = std::norm(p.beta);
  const double inf = std::numeric_limits<double>::infinity();

  s.t_qs = (p.eta > 0.0 && p.kappa1 > 0.0 && b2 > 0.0)
               ? (1.0 / (p.eta * p.kappa1)) * (k * k / (4.0 * p.kappa1 * b2))
               : inf;

  const double flux = 4.0 * p.kappa1 * b2 / (k * k);
  const double shift = 1.0 + 4.0 * std::pow(p.g, 4) * n_typical * n_typical /
                                 (p.delta * p.delta * k * k);
  const double p_exc = p.g * p.g /
                       (p.delta * p.delta + 0.25 * p.gamma_sp * p.gamma_sp);
  const double rate = p.gamma_sp * flux / shift * p_exc * (p.n_atoms() / 2.0);
  s.t_sp = rate > 0.0 ? 1.0 / rate : inf;

  s.circle_center = k > 0.0 ? std::sqrt(p.kappa1) * std::abs(p.beta) / k : 0.0;
  s.circle_radius = s.circle_center;
  return s;
}

struct ValidationReport {
  std::vector<std::string> violations;  // invariant breaks
  std::vector<std::string> warnings;    // soft conditions
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const PhysicalParams& p) {
  ValidationReport r;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0)) r.violations.push_back(std::string(name) + " negative");
  };
  nonneg(p.g, "g");
  nonneg(p.kappa1, "kappa1");
  nonneg(p.kappa_loss1, "kappa_loss1");
  nonneg(p.kappa2, "kappa2");
  nonneg(p.kappa_loss2, "kappa_loss2");
  nonneg(p.gamma_sp, "gamma_sp");
  if (!(p.eta >= 0.0 && p.eta <= 1.0)) r.violations.push_back("eta out of range");
  if (p.delta == 0.0) r.violations.push_back("delta zero");
  const double twoj = 2.0 * p.big_j;
  if (!(p.big_j >= 0.0) || std::abs(twoj - std::lround(twoj)) > 1e-9)
    r.violations.push_back("big_j not a nonnegative multiple of 1/2");

  const double kc = p.kappa_c();
  if (kc > 0.0) {
    const double ratio = std::abs(p.epsilon) / kc;
    if (ratio >= 0.5)
      r.warnings.push_back("above OPO threshold: |epsilon|/(kappa2+kappa_loss2) = " +
                           std::to_string(ratio));
  } else if (std::abs(p.epsilon) > 0.0) {
    r.violations.push_back("epsilon nonzero with kappa2+kappa_loss2 = 0");
  }
  return r;
}

}  // namespace catprobe

#endif
