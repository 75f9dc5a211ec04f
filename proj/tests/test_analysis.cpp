#include <catch2/catch.hpp>

#include "catprobe/analysis.hpp"
#include "catprobe/coherent.hpp"

using namespace catprobe;

namespace {

AtomicDensityMatrix basis_state(double big_j, double n) {
  SpinBasis basis(big_j);
  AtomicDensityMatrix rho;
  rho.big_j = big_j;
  rho.rho = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  rho.rho(basis.index_of(n), basis.index_of(n)) = 1.0;
  return rho;
}

}  // namespace

TEST_CASE("peak summary: degenerate and extremal inputs") {
  SECTION("pure |0><0| is single peaked at zero") {
    const auto s = peak_summary(basis_state(4.0, 0.0));
    CHECK(s.d_over_2 == 0.0);
    CHECK(s.d == 0.0);
    CHECK(s.single_peaked);
  }

  SECTION("equal mixture of the extremal states peaks at J") {
    SpinBasis basis(3.0);
    AtomicDensityMatrix rho;
    rho.big_j = 3.0;
    rho.rho = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    rho.rho(basis.index_of(3.0), basis.index_of(3.0)) = 0.5;
    rho.rho(basis.index_of(-3.0), basis.index_of(-3.0)) = 0.5;
    const auto s = peak_summary(rho);
    CHECK(s.d_over_2 == 3.0);
    CHECK(s.d == 6.0);
    CHECK_FALSE(s.single_peaked);
  }

  SECTION("half-integer spin with a flat diagonal is single peaked") {
    SpinBasis basis(1.5);
    AtomicDensityMatrix rho;
    rho.big_j = 1.5;
    rho.rho = Eigen::MatrixXcd::Identity(4, 4) * 0.25;
    const auto s = peak_summary(rho);
    CHECK(s.single_peaked);
    CHECK(s.d_over_2 <= 0.5);
  }

  SECTION("reversal invariance for symmetric diagonals") {
    auto p = reichel_preset();
    p.big_j = 20.0;
    p.eta = 0.9;
    const auto rec = MeasurementRecord::from_integrated(2e-4, 1e-6, 8);
    const auto cs = conditional_state(p, AtomicCoefficients::css_x(20.0), rec, true, true);
    auto flipped = cs.rho_at;
    flipped.rho = cs.rho_at.rho.reverse().eval();
    const auto a = peak_summary(cs.rho_at);
    const auto b = peak_summary(flipped);
    CHECK(a.d_over_2 == Approx(b.d_over_2).margin(1e-12));
    CHECK(a.single_peaked == b.single_peaked);
  }
}

TEST_CASE("peak summary interpolates between grid points") {
  SpinBasis basis(5.0);
  AtomicDensityMatrix rho;
  rho.big_j = 5.0;
  rho.rho = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  // parabola with vertex at n = 2.3 sampled on the integer grid
  for (int i = 0; i < basis.dim(); ++i) {
    const double n = basis.n_of(i);
    rho.rho(i, i) = std::max(0.0, 1.0 - 0.1 * (n - 2.3) * (n - 2.3));
  }
  rho.rho /= rho.rho.trace();
  const auto s = peak_summary(rho);
  CHECK(s.d_over_2 == Approx(2.3).margin(1e-9));
  CHECK_FALSE(s.single_peaked);
}

TEST_CASE("spin Q-function: coherent-state lobe, normalization, cat-state symmetry") {
  SECTION("x-oriented coherent spin state peaks at theta = pi/2, phi = 0") {
    const auto coeffs = AtomicCoefficients::css_x(10.0);
    AtomicDensityMatrix rho;
    rho.big_j = 10.0;
    rho.rho = coeffs.c;
    const auto q = spin_q_function(rho, 100, 200);
    CHECK(q.integral() == Approx(1.0).margin(1e-6));
    Eigen::Index it = 0, ip = 0;
    q.values.maxCoeff(&it, &ip);
    CHECK(std::abs(q.theta(it) - 0.5 * pi) < 0.05);
    const double ph = q.phi(ip);
    CHECK(std::min(ph, two_pi - ph) < 0.05);
  }

  SECTION("conditioned state shows two lobes symmetric about the equator") {
    auto p = reichel_preset();
    p.big_j = 50.0;
    const auto rec = MeasurementRecord::from_integrated(5e-4, 1e-6, 8);
    const auto cs = conditional_state(p, AtomicCoefficients::css_x(50.0), rec, true, true);
    const auto q = spin_q_function(cs.rho_at, 200, 400);
    CHECK(q.integral() == Approx(1.0).margin(1e-6));
    CHECK(q.values.minCoeff() >= 0.0);
    // mirror symmetry theta -> pi - theta of the values
    double sym = 0.0;
    for (int i = 0; i < q.theta.size(); ++i)
      sym = std::max(sym, (q.values.row(i) -
                           q.values.row(q.theta.size() - 1 - i)).cwiseAbs().maxCoeff());
    CHECK(sym < 1e-10);
    // two lobes: maxima away from the equator
    Eigen::Index it = 0, ip = 0;
    q.values.maxCoeff(&it, &ip);
    CHECK(std::abs(q.theta(it) - 0.5 * pi) > 0.05);
  }
}

TEST_CASE("series summaries and binning") {
  std::vector<TrajectorySummary> batch;
  TrajectorySummary t;
  t.seed = 1;
  t.purity = 0.9;
  t.d_over_2 = 5.0;
  t.y_final = 1.0;
  t.single_peaked = false;
  batch.push_back(t);

  SECTION("single trajectory passes through unchanged") {
    const auto s = summarize_series("one", batch);
    CHECK(s.count == 1);
    CHECK(s.median_purity == 0.9);
    CHECK(s.median_d_over_2 == 5.0);
    CHECK(s.fraction_double_peaked == 1.0);
  }

  SECTION("median and double-peak fraction") {
    TrajectorySummary u = t;
    u.purity = 0.5;
    u.single_peaked = true;
    batch.push_back(u);
    TrajectorySummary v = t;
    v.purity = 0.7;
    batch.push_back(v);
    const auto s = summarize_series("three", batch);
    CHECK(s.median_purity == Approx(0.7));
    CHECK(s.min_purity == Approx(0.5));
    CHECK(s.fraction_double_peaked == Approx(2.0 / 3.0));
  }

  SECTION("binning by record value") {
    batch.clear();
    for (int k = 0; k < 100; ++k) {
      TrajectorySummary w;
      w.y_final = k / 99.0;
      w.purity = w.y_final > 0.5 ? 1.0 : 0.0;
      batch.push_back(w);
    }
    const auto bins = bin_by_y(batch, 2);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].mean_purity == Approx(0.0).margin(1e-12));
    CHECK(bins[1].mean_purity == Approx(1.0).margin(1e-12));
    CHECK(bins[0].count + bins[1].count == 100);
  }

  SECTION("empty batches are rejected") {
    batch.clear();
    CHECK_THROWS_AS(summarize_series("empty", batch), std::invalid_argument);
    CHECK_THROWS_AS(bin_by_y(batch, 4), std::invalid_argument);
  }
}
