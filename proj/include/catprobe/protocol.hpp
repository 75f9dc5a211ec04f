#ifndef CATPROBE_PROTOCOL_HPP
#define CATPROBE_PROTOCOL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <thread>
#include <vector>

#include "catprobe/analysis.hpp"
#include "catprobe/coherent.hpp"
#include "catprobe/gaussian.hpp"

namespace catprobe {

// ---------------------------------------------------------------------------
// Conditional-preparation protocol: drive and squeezing on for t_probe, then
// both off for an additional 15/kappa1 of continued observation so the cavity
// fields decay, then read out the atomic state.
// ---------------------------------------------------------------------------

struct ScatterOptions {
  double decay_kappa1_units = 15.0;  // continued-observation time in 1/kappa1
  bool steady_v = true;              // freeze V at its fixed point while driving
  bool fold_symmetric = true;        // propagate one symmetry representative
  int pd_check_every = 64;
};

inline TrajectorySummary run_scatter_trajectory(const PhysicalParams& p,
                                                double t_probe, double dt,
                                                std::uint64_t seed,
                                                const ScatterOptions& opt = {},
                                                AtomicDensityMatrix* rho_out = nullptr,
                                                GaussianEnsemble* ens_out = nullptr) {
  GaussianOptions gopt;
  gopt.steady_v = opt.steady_v;
  gopt.fold_symmetric = opt.fold_symmetric &&
                        std::abs(std::remainder(p.phi, pi)) < 1e-12 &&
                        p.beta.real() == 0.0 && p.epsilon.real() == 0.0;
  gopt.pd_check_every = opt.pd_check_every;

  const auto coeffs = AtomicCoefficients::css_x(p.big_j);
  auto ens = make_ensemble(p, coeffs, gopt);
  GaussianRng rng(seed);

  const long steps = std::lround(t_probe / dt);
  for (long k = 0; k < steps; ++k) step(ens, rng.wiener(dt), dt);

  PhysicalParams off = p;
  off.beta = cd(0.0, 0.0);
  off.epsilon = cd(0.0, 0.0);
  set_ensemble_params(ens, off);
  const long decay_steps = std::lround(opt.decay_kappa1_units / p.kappa1 / dt);
  for (long k = 0; k < decay_steps; ++k) step(ens, rng.wiener(dt), dt);

  const auto rho = extract_atomic_state(ens);
  const auto peak = peak_summary(rho);
  TrajectorySummary s;
  s.seed = seed;
  s.purity = rho.purity();
  s.d_over_2 = peak.d_over_2;
  s.d_over_2_discrete = peak.d_over_2_discrete;
  s.single_peaked = peak.single_peaked;
  s.y_final = ens.record().integrated();
  if (rho_out) *rho_out = rho;
  if (ens_out) *ens_out = std::move(ens);
  return s;
}

// Coherent-probe reference trajectory: the analytic conditional solution on a
// sampled record, probe turned off at the end.
inline TrajectorySummary run_coherent_reference_trajectory(const PhysicalParams& p,
                                                           double t_probe,
                                                           std::uint64_t seed,
                                                           int record_steps = 256) {
  const auto coeffs = AtomicCoefficients::css_x(p.big_j);
  const auto rec = sample_record(p, coeffs, t_probe, t_probe / record_steps, seed);
  const auto cs = conditional_state(p, coeffs, rec, /*steady=*/true, /*probe_off=*/true);
  const auto peak = peak_summary(cs.rho_at);
  TrajectorySummary s;
  s.seed = seed;
  s.purity = purity_full(p, coeffs, rec, /*steady=*/true, /*probe_off=*/true);
  s.d_over_2 = peak.d_over_2;
  s.d_over_2_discrete = peak.d_over_2_discrete;
  s.single_peaked = peak.single_peaked;
  s.y_final = rec.integrated();
  return s;
}

// Step-halving convergence check for a parameter set: the same trajectory is
// integrated at dt and at dt/2 (with the coarse Wiener increments split in
// two), and the final purities compared. Production parameter sets must show
// a purity change below 1e-4.
struct ConvergenceReport {
  double purity_dt = 0.0;
  double purity_half = 0.0;
  double delta() const { return std::abs(purity_dt - purity_half); }
};

inline ConvergenceReport step_halving_check(const PhysicalParams& p, double t_probe,
                                            double dt, std::uint64_t seed,
                                            const ScatterOptions& opt = {}) {
  const long steps = std::lround(t_probe / dt);
  std::vector<double> fine(2 * static_cast<std::size_t>(steps));
  GaussianRng rng(seed);
  for (auto& x : fine) x = rng.wiener(0.5 * dt);

  const auto coeffs = AtomicCoefficients::css_x(p.big_j);
  GaussianOptions gopt;
  gopt.steady_v = opt.steady_v;
  ConvergenceReport rep;
  {
    auto ens = make_ensemble(p, coeffs, gopt);
    for (long k = 0; k < steps; ++k)
      step(ens, fine[2 * static_cast<std::size_t>(k)] +
                    fine[2 * static_cast<std::size_t>(k) + 1],
           dt);
    rep.purity_dt = extract_atomic_state(ens).purity();
  }
  {
    auto ens = make_ensemble(p, coeffs, gopt);
    for (std::size_t k = 0; k < fine.size(); ++k) step(ens, fine[k], 0.5 * dt);
    rep.purity_half = extract_atomic_state(ens).purity();
  }
  return rep;
}

// Trajectory batch with per-trajectory seeds seed, seed+1, ...; parallel
// across a small worker pool, deterministic output order.
template <class Fn>
inline std::vector<TrajectorySummary> run_trajectory_batch(int count,
                                                           std::uint64_t base_seed,
                                                           int threads, Fn&& fn) {
  std::vector<TrajectorySummary> out(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::atomic<int> failed_at{-1};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= count || failed_at.load() >= 0) return;
      try {
        out[static_cast<std::size_t>(k)] = fn(base_seed + static_cast<std::uint64_t>(k));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (failed_at.load() < 0 || k < failed_at.load()) {
          failed_at.store(k);
          error = std::current_exception();
        }
      }
    }
  };
  const int nthreads = std::max(1, std::min(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed_at.load() >= 0) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("trajectory " + std::to_string(failed_at.load()) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace catprobe

#endif
