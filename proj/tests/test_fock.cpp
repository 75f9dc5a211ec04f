#include <catch2/catch.hpp>

#include <cmath>

#include "catprobe/coherent.hpp"
#include "catprobe/crosscheck.hpp"
#include "catprobe/fock.hpp"
#include "catprobe/rng.hpp"

using namespace catprobe;

TEST_CASE("generator assembly: dark state and cutoff preconditions") {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.beta = cd(0.0, 0.0);
  p.eta = 0.0;
  const auto g = build_generators(p, 4, 2);
  const auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(1.0), 4, 2);
  Eigen::MatrixXcd out;
  apply_deterministic(g, st.rho, out);
  CHECK(out.cwiseAbs().maxCoeff() < 1e-12 * p.kappa());

  CHECK_THROWS_AS(build_generators(p, 1, 2), std::invalid_argument);
}

TEST_CASE("deterministic generator is traceless on random states") {
  const auto p = squeezed_check_params();
  const auto g = build_generators(p, 5, 5);
  GaussianRng rng(3);
  Eigen::MatrixXcd out;
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXcd m(g.dim, g.dim);
    for (int i = 0; i < g.dim; ++i)
      for (int j = 0; j < g.dim; ++j) m(i, j) = cd(rng.normal(), rng.normal());
    m = (m + m.adjoint()).eval();
    m /= m.trace().real();
    apply_deterministic(g, m, out);
    CHECK(std::abs(out.trace()) < 1e-12 * p.kappa() * m.cwiseAbs().maxCoeff() * g.dim);
  }
}

TEST_CASE("measurement superoperator is traceless by construction") {
  const auto p = squeezed_check_params();
  const auto g = build_generators(p, 4, 4);
  const auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(1.0), 4, 4);
  Eigen::MatrixXcd out;
  double mu = 0.0;
  apply_measurement(g, st.rho, out, &mu);
  CHECK(std::abs(out.trace()) < 1e-14);
  CHECK(mu == Approx(measured_mean(g, st.rho)));
}

TEST_CASE("decoupled second cavity stays in vacuum along a noisy run") {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.eta = 1.0;
  p.phi = pi;
  p.beta = cd(0.0, -std::abs(p.beta));
  const auto g = build_generators(p, 8, 3);
  auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(1.0), 8, 3);
  const double dt = 2e-3 / p.kappa();
  const long steps = 1000;
  std::vector<double> dw(steps);
  GaussianRng rng(7);
  for (auto& x : dw) x = rng.wiener(dt);
  integrate(st, g, dw, dt, steps, nullptr);
  CHECK(st.mode2_vacuum_deviation() < 1e-14);
}

TEST_CASE("conditioned cavity amplitude follows the transient solution") {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.eta = 0.9;
  p.phi = pi;
  PhysicalParams p_sme = p;
  p_sme.beta = cd(0.0, -std::abs(p.beta));
  const auto g = build_generators(p_sme, 10, 2);
  auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(1.0), 10, 2);
  const double dt = 1e-3 / p.kappa();
  const long steps = std::lround(5.0 / p.kappa() / dt);
  std::vector<double> dw(static_cast<std::size_t>(steps));
  GaussianRng rng(11);
  for (auto& x : dw) x = rng.wiener(dt);
  FockMonitor mon;
  integrate(st, g, dw, dt, steps, &mon);
  for (int ia = 0; ia < 3; ++ia) {
    const cd ref = alpha_transient(p, ia - 1.0, dt * steps);
    CHECK(std::abs(st.conditional_mode1_mean(ia) - ref) < 1e-6);
  }
  CHECK(mon.min_eigenvalue > -1e-9);
  CHECK(mon.max_herm_correction < 1e-10);
  CHECK(mon.max_top_layer < 1e-6);
}

TEST_CASE("unobserved run equals the noise average of observed runs") {
  PhysicalParams p = reichel_preset();
  p.big_j = 1.0;
  p.phi = pi;
  p.beta = cd(0.0, -std::abs(p.beta));
  const int n1 = 6, n2 = 2;
  const auto coeffs = AtomicCoefficients::css_x(1.0);
  const double dt = 2e-3 / p.kappa();
  const long steps = std::lround(1.0 / p.kappa() / dt);

  PhysicalParams p0 = p;
  p0.eta = 0.0;
  const auto g0 = build_generators(p0, n1, n2);
  auto ref = TruncatedState::from_coefficients(coeffs, n1, n2);
  std::vector<double> zeros(static_cast<std::size_t>(steps), 0.0);
  integrate(ref, g0, zeros, dt, steps, nullptr);

  p.eta = 0.9;
  const auto g = build_generators(p, n1, n2);
  const int n_traj = 200;
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(ref.dim(), ref.dim());
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(ref.dim(), ref.dim());
  for (int k = 0; k < n_traj; ++k) {
    auto st = TruncatedState::from_coefficients(coeffs, n1, n2);
    std::vector<double> dw(static_cast<std::size_t>(steps));
    GaussianRng rng(40000 + static_cast<std::uint64_t>(k));
    for (auto& x : dw) x = rng.wiener(dt);
    integrate(st, g, dw, dt, steps, nullptr);
    mean += st.rho;
    m2 += st.rho.cwiseAbs2();
  }
  mean /= n_traj;
  int outliers = 0;
  for (int i = 0; i < ref.dim(); ++i)
    for (int j = 0; j < ref.dim(); ++j) {
      const double var =
          std::max(m2(i, j) / n_traj - std::norm(mean(i, j)), 0.0) / n_traj;
      if (std::abs(mean(i, j) - ref.rho(i, j)) > 3.0 * std::sqrt(var) + 1e-9)
        ++outliers;
    }
  CHECK(outliers <= 2);
}

TEST_CASE("integrator rejects an oversized step") {
  const auto p = squeezed_check_params();
  const auto g = build_generators(p, 4, 4);
  auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(1.0), 4, 4);
  std::vector<double> dw(10, 0.0);
  CHECK_THROWS_AS(integrate(st, g, dw, 0.1 / p.kappa(), 10, nullptr),
                  std::invalid_argument);
}

TEST_CASE("cutoff saturation is detected") {
  PhysicalParams p = reichel_preset();
  p.big_j = 0.5;
  p.phi = pi;
  p.eta = 0.5;
  p.beta = cd(0.0, -40.0 * std::abs(p.beta));  // drives |alpha| ~ 4 into a cutoff of 4
  const auto g = build_generators(p, 4, 2);
  auto st = TruncatedState::from_coefficients(AtomicCoefficients::css_x(0.5), 4, 2);
  const double dt = 1e-3 / p.kappa();
  const long steps = std::lround(10.0 / p.kappa() / dt);
  std::vector<double> dw(static_cast<std::size_t>(steps), 0.0);
  CHECK_THROWS_WITH(integrate(st, g, dw, dt, steps, nullptr),
                    Catch::Contains("cutoff"));
}
