#ifndef CATPROBE_CROSSCHECK_HPP
#define CATPROBE_CROSSCHECK_HPP

#include <cmath>
#include <string>
#include <vector>

#include "catprobe/coherent.hpp"
#include "catprobe/fock.hpp"
#include "catprobe/gaussian.hpp"
#include "catprobe/rng.hpp"

namespace catprobe {

// ---------------------------------------------------------------------------
// Cross-module validation runs. The truncated-basis integrator is the ground
// truth; these drive it against the analytic solution and the
// Gaussian-component integration on shared noise.
//
// Convention note: the analytic module describes a real drive with
// x-quadrature detection. In the cascaded master equation the same physics is
// beta -> -i beta with phi = pi, which is the mapping used here.
// ---------------------------------------------------------------------------

struct CoherentOracleReport {
  double max_dev = 0.0;          // elementwise atomic-matrix deviation
  double max_alpha_dev = 0.0;    // conditional <a> vs the transient amplitude
  double mode2_deviation = 0.0;  // population outside mode-2 vacuum
  FockMonitor monitor;
  double dt = 0.0, t = 0.0;
};

// J = 1 coherent drive, unit efficiency: truncated-basis run against the
// exact conditional solution on the shared record.
inline CoherentOracleReport run_coherent_oracle_check(std::uint64_t seed,
                                                      double kappa_dt = 5e-4,
                                                      double kappa_t = 20.0,
                                                      int cutoff1 = 12) {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.eta = 1.0;
  p.phi = pi;
  PhysicalParams p_sme = p;
  p_sme.beta = cd(0.0, -std::abs(p.beta));

  const double dt = kappa_dt / p.kappa();
  const long steps = std::lround(kappa_t / p.kappa() / dt);
  std::vector<double> dw(static_cast<std::size_t>(steps));
  GaussianRng rng(seed);
  for (auto& x : dw) x = rng.wiener(dt);

  const auto coeffs = AtomicCoefficients::css_x(1.0);
  auto gens = build_generators(p_sme, cutoff1, 2);
  auto state = TruncatedState::from_coefficients(coeffs, cutoff1, 2);
  CoherentOracleReport rep;
  rep.dt = dt;
  const auto rec = integrate(state, gens, dw, dt, steps, &rep.monitor);
  rep.t = rec.duration();

  const auto cs = conditional_state(p, coeffs, rec, /*steady=*/false, /*probe_off=*/false);
  const auto rat = state.atomic_density();
  rep.max_dev = (rat.rho - cs.rho_at.rho).cwiseAbs().maxCoeff();
  for (int ia = 0; ia < 3; ++ia) {
    const cd a_ref = alpha_transient(p, ia - 1.0, rep.t);
    rep.max_alpha_dev =
        std::max(rep.max_alpha_dev, std::abs(state.conditional_mode1_mean(ia) - a_ref));
  }
  rep.mode2_deviation = state.mode2_vacuum_deviation();
  return rep;
}

struct SqueezedOracleReport {
  double max_dev = 0.0;               // gaussian vs truncated atomic matrix
  double steady_mean_dev_gauss = 0.0; // unobserved steady means vs closed form
  double steady_mean_dev_fock = 0.0;
  FockMonitor monitor;
  double dt = 0.0, t = 0.0;
};

inline PhysicalParams squeezed_check_params(double eps_over_k2 = 0.05) {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.kappa2 = p.kappa1;
  p.kappa_loss2 = 0.0;
  p.eta = 0.9;
  p.phi = pi;
  p.epsilon = cd(0.0, eps_over_k2 * p.kappa2);
  p.beta = cd(0.0, std::abs(p.beta));
  return p;
}

// Closed-form unobserved steady mean of the component conditioned on |n><n|
// for phi = pi, beta = i|beta|, epsilon = i Im(eps): cavity-1 follows the
// steady amplitude with the drive replaced by
// |beta| (2 kappa2/(kappa2 + kappa_loss2 + 2 Im eps) - 1).
inline Vector4cd steady_mean_closed_form(const PhysicalParams& p, double n) {
  const double babs = std::abs(p.beta);
  const double denom = p.kappa_c() + 2.0 * p.epsilon.imag();
  PhysicalParams peff = p;
  peff.beta = cd(babs * (2.0 * p.kappa2 / denom - 1.0), 0.0);
  const cd a = alpha_steady(peff, n);
  Vector4cd v;
  v << std::sqrt(2.0) * a.real(), std::sqrt(2.0) * a.imag(), 0.0,
      -2.0 * babs * std::sqrt(2.0 * p.kappa2) / denom;
  return v;
}

// J = 1 squeezed probing: Gaussian-component integration against the
// truncated basis on a shared Wiener stream, plus the unobserved steady-state
// means of both modules against the closed form.
inline SqueezedOracleReport run_squeezed_oracle_check(std::uint64_t seed,
                                                      double kappa_dt = 5e-4,
                                                      double kappa_t = 20.0,
                                                      int cutoff1 = 8,
                                                      int cutoff2 = 12) {
  const PhysicalParams p = squeezed_check_params();
  const double dt = kappa_dt / p.kappa();
  const long steps = std::lround(kappa_t / p.kappa() / dt);
  std::vector<double> dw(static_cast<std::size_t>(steps));
  GaussianRng rng(seed);
  for (auto& x : dw) x = rng.wiener(dt);

  const auto coeffs = AtomicCoefficients::css_x(1.0);
  SqueezedOracleReport rep;
  rep.dt = dt;
  rep.t = dt * static_cast<double>(steps);

  auto gens = build_generators(p, cutoff1, cutoff2);
  auto state = TruncatedState::from_coefficients(coeffs, cutoff1, cutoff2);
  integrate(state, gens, dw, dt, steps, &rep.monitor);

  auto ens = make_ensemble(p, coeffs, {});
  for (long k = 0; k < steps; ++k) step(ens, dw[static_cast<std::size_t>(k)], dt);

  rep.max_dev = (extract_atomic_state(ens).rho - state.atomic_density().rho)
                    .cwiseAbs()
                    .maxCoeff();

  // unobserved steady state
  PhysicalParams p0 = p;
  p0.eta = 0.0;
  const long steps0 = std::lround(40.0 / p.kappa() / dt);
  auto ens0 = make_ensemble(p0, coeffs, {});
  for (long k = 0; k < steps0; ++k) step(ens0, 0.0, dt);
  for (const auto& c : ens0.components()) {
    if (c.i != c.k) continue;
    const Vector4cd ref = steady_mean_closed_form(p0, c.n);
    rep.steady_mean_dev_gauss =
        std::max(rep.steady_mean_dev_gauss, (c.ybar - ref).cwiseAbs().maxCoeff());
  }
  {
    // unobserved run: product-state occupations, a shallower mode-2 cutoff is
    // adequate here (no conditioning fluctuations)
    const double dt0 = 1e-3 / p.kappa();
    const long stepsf = std::lround(40.0 / p.kappa() / dt0);
    auto gens0 = build_generators(p0, cutoff1, 8);
    auto st0 = TruncatedState::from_coefficients(coeffs, cutoff1, 8);
    std::vector<double> zero(static_cast<std::size_t>(stepsf), 0.0);
    integrate(st0, gens0, zero, dt0, stepsf, nullptr);
    // at eta = 0 the diagonal blocks share one field state per n
    for (int ia = 0; ia < 3; ++ia) {
      const Vector4cd ref = steady_mean_closed_form(p0, ia - 1.0);
      const cd am = st0.conditional_mode1_mean(ia);
      const cd a_ref = (ref(0) + cd(0.0, 1.0) * ref(1)) / std::sqrt(2.0);
      rep.steady_mean_dev_fock = std::max(rep.steady_mean_dev_fock, std::abs(am - a_ref));
    }
    const cd c_ref_full = (steady_mean_closed_form(p0, 0.0)(2) +
                           cd(0.0, 1.0) * steady_mean_closed_form(p0, 0.0)(3)) /
                          std::sqrt(2.0);
    rep.steady_mean_dev_fock =
        std::max(rep.steady_mean_dev_fock, std::abs(st0.mode2_mean() - c_ref_full));
  }
  return rep;
}

struct SymmetrySuiteReport {
  std::vector<double> residuals;      // one per seed, symmetric parameters
  double max_residual = 0.0;
  double broken_residual = 0.0;       // negative control, real drive
};

inline SymmetrySuiteReport run_symmetry_suite(int n_seeds, long steps,
                                              std::uint64_t base_seed,
                                              double big_j = 2.0) {
  PhysicalParams p = squeezed_check_params(0.025);
  p.big_j = big_j;
  const double dt = 0.01 / max_component_rate(p);
  const auto coeffs = AtomicCoefficients::css_x(big_j);
  SymmetrySuiteReport rep;
  for (int s = 0; s < n_seeds; ++s) {
    GaussianRng rng(base_seed + static_cast<std::uint64_t>(s));
    auto ens = make_ensemble(p, coeffs, {});
    for (long k = 0; k < steps; ++k) step(ens, rng.wiener(dt), dt);
    const double r = check_time_reversal(ens).max();
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  PhysicalParams pb = p;
  pb.beta = cd(std::abs(p.beta), 0.0);  // real drive breaks the reflection symmetry
  GaussianRng rng(base_seed);
  auto ens = make_ensemble(pb, coeffs, {});
  for (long k = 0; k < steps; ++k) step(ens, rng.wiener(dt), dt);
  rep.broken_residual = check_time_reversal(ens, /*enforce_preconditions=*/false).max();
  return rep;
}

}  // namespace catprobe

#endif
