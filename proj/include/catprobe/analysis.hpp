#ifndef CATPROBE_ANALYSIS_HPP
#define CATPROBE_ANALYSIS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "catprobe/spin.hpp"

namespace catprobe {

// ---------------------------------------------------------------------------
// Peak structure of the n-distribution
// ---------------------------------------------------------------------------

struct PeakSummary {
  double d_over_2 = 0.0;           // interpolated position of the nonnegative peak
  double d = 0.0;                  // = 2 d_over_2
  double d_over_2_discrete = 0.0;  // basis value at the discrete argmax
  bool single_peaked = false;
  double peak_height = 0.0;
};

// Locate the maximum of the diagonal over n >= 0. Sub-grid resolution by a
// quadratic fit through the three points around the discrete argmax; the
// mirror peak at -d/2 is implied by symmetry.
inline PeakSummary peak_summary(const AtomicDensityMatrix& rho_at) {
  const int d = rho_at.dim();
  const Eigen::VectorXd w = rho_at.diagonal();
  const double big_j = rho_at.big_j;
  const int i0 = static_cast<int>(std::ceil(big_j - 1e-9));  // first index with n >= 0

  int imax = i0;
  for (int i = i0; i < d; ++i)
    if (w(i) > w(imax)) imax = i;

  PeakSummary out;
  out.d_over_2_discrete = rho_at.n_of(imax);
  out.peak_height = w(imax);

  if (imax > 0 && imax < d - 1) {
    const double wl = w(imax - 1), wc = w(imax), wr = w(imax + 1);
    const double denom = wl - 2.0 * wc + wr;
    double shift = 0.0;
    if (denom < 0.0) shift = 0.5 * (wl - wr) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    out.d_over_2 = rho_at.n_of(imax) + shift;
    out.peak_height = wc - 0.25 * (wl - wr) * shift;
  } else {
    out.d_over_2 = rho_at.n_of(imax);
  }
  out.d_over_2 = std::clamp(out.d_over_2, 0.0, big_j);
  out.d = 2.0 * out.d_over_2;

  // single peaked: maximum at n in {0, 1/2} and no interior local maximum
  bool interior_max = false;
  for (int i = std::max(i0, 1) + 1; i < d - 1; ++i)
    if (w(i) > w(i - 1) && w(i) > w(i + 1) && rho_at.n_of(i) > 0.5 + 1e-9)
      interior_max = true;
  out.single_peaked = (out.d_over_2_discrete <= 0.5 + 1e-9) && !interior_max;
  return out;
}

// ---------------------------------------------------------------------------
// Spin Q-function on the Bloch sphere
// ---------------------------------------------------------------------------

struct QFunctionGrid {
  Eigen::VectorXd theta;         // polar nodes (Gauss-Legendre in cos theta)
  Eigen::VectorXd theta_weight;  // quadrature weights for d(cos theta)
  Eigen::VectorXd phi;           // uniform azimuthal grid
  Eigen::MatrixXd values;        // n_theta x n_phi, nonnegative

  // integral over the sphere with measure sin(theta) dtheta dphi
  double integral() const {
    const double dphi = two_pi / static_cast<double>(phi.size());
    double acc = 0.0;
    for (int i = 0; i < theta.size(); ++i)
      acc += theta_weight(i) * values.row(i).sum() * dphi;
    return acc;
  }
};

namespace detail {
// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x(i) = -z;
    x(n - 1 - i) = z;
    w(i) = w(n - 1 - i) = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}
}  // namespace detail

// Q(theta, phi) = (2J+1)/(4 pi) <theta,phi| rho |theta,phi> with the spin
// coherent state expanded in the J_z basis through log-binomials. The polar
// grid uses Gauss-Legendre nodes in cos(theta), which makes the sphere
// integral exact to rounding for any 2J+1 dimensional state.
inline QFunctionGrid spin_q_function(const AtomicDensityMatrix& rho_at,
                                     int n_theta = 200, int n_phi = 400) {
  const int d = rho_at.dim();
  const double big_j = rho_at.big_j;
  const double twoj = 2.0 * big_j;
  QFunctionGrid grid;
  Eigen::VectorXd xg, wg;
  detail::gauss_legendre(n_theta, xg, wg);
  grid.theta.resize(n_theta);
  grid.theta_weight = wg;
  grid.phi.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) grid.phi(j) = two_pi * j / n_phi;
  grid.values.resize(n_theta, n_phi);

  const double pref = (twoj + 1.0) / (4.0 * pi);
  Eigen::VectorXd logb(d);
  for (int i = 0; i < d; ++i) logb(i) = 0.5 * log_binomial(twoj, big_j + rho_at.n_of(i));

  Eigen::VectorXd r(d);
  Eigen::VectorXcd fourier(2 * d - 1);
  for (int it = 0; it < n_theta; ++it) {
    const double th = std::acos(xg(n_theta - 1 - it));  // theta ascending
    grid.theta(it) = th;
    const double lc = std::log(std::max(std::cos(0.5 * th), 1e-300));
    const double ls = std::log(std::max(std::sin(0.5 * th), 1e-300));
    for (int i = 0; i < d; ++i) {
      const double n = rho_at.n_of(i);
      r(i) = std::exp(logb(i) + (big_j + n) * lc + (big_j - n) * ls);
    }
    // collapse <c|rho|c> into a Fourier series in phi: value = sum_k g_k e^{i k phi}
    fourier.setZero();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        fourier(b - a + d - 1) += r(a) * r(b) * rho_at.rho(a, b);
    for (int jp = 0; jp < n_phi; ++jp) {
      const double ph = grid.phi(jp);
      double acc = fourier(d - 1).real();
      for (int k = 1; k < d; ++k) {
        const cd e(std::cos(k * ph), std::sin(k * ph));
        acc += 2.0 * (fourier(d - 1 + k) * e).real();
      }
      grid.values(it, jp) = pref * std::max(acc, 0.0);
    }
  }
  // theta weights include the measure mapping: int f sin(th) dth = int f d(cos th)
  grid.theta_weight.reverseInPlace();
  return grid;
}

// ---------------------------------------------------------------------------
// Trajectory batch summaries (scatter output)
// ---------------------------------------------------------------------------

struct TrajectorySummary {
  std::uint64_t seed = 0;
  double purity = 0.0;
  double d_over_2 = 0.0;
  double d_over_2_discrete = 0.0;
  double y_final = 0.0;
  bool single_peaked = false;
};

struct SeriesSummary {
  std::string label;
  std::size_t count = 0;
  double median_purity = 0.0;
  double min_purity = 0.0;
  double median_d_over_2 = 0.0;
  double fraction_double_peaked = 0.0;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median_of: empty");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline SeriesSummary summarize_series(const std::string& label,
                                      const std::vector<TrajectorySummary>& batch) {
  if (batch.empty()) throw std::invalid_argument("summarize_series: empty batch");
  SeriesSummary s;
  s.label = label;
  s.count = batch.size();
  std::vector<double> pur, dd;
  std::size_t npeaked = 0;
  for (const auto& t : batch) {
    pur.push_back(t.purity);
    dd.push_back(t.d_over_2);
    if (!t.single_peaked) ++npeaked;
  }
  s.median_purity = median_of(pur);
  s.min_purity = *std::min_element(pur.begin(), pur.end());
  s.median_d_over_2 = median_of(dd);
  s.fraction_double_peaked = static_cast<double>(npeaked) / batch.size();
  return s;
}

struct YBin {
  double y_lo = 0.0, y_hi = 0.0;
  double mean_purity = 0.0;
  std::size_t count = 0;
};

inline std::vector<YBin> bin_by_y(const std::vector<TrajectorySummary>& batch,
                                  int nbins) {
  if (batch.empty() || nbins <= 0) throw std::invalid_argument("bin_by_y: empty input");
  double lo = batch.front().y_final, hi = lo;
  for (const auto& t : batch) {
    lo = std::min(lo, t.y_final);
    hi = std::max(hi, t.y_final);
  }
  if (hi <= lo) hi = lo + 1.0;
  std::vector<YBin> bins(static_cast<std::size_t>(nbins));
  for (int b = 0; b < nbins; ++b) {
    bins[static_cast<std::size_t>(b)].y_lo = lo + (hi - lo) * b / nbins;
    bins[static_cast<std::size_t>(b)].y_hi = lo + (hi - lo) * (b + 1) / nbins;
  }
  for (const auto& t : batch) {
    int b = static_cast<int>((t.y_final - lo) / (hi - lo) * nbins);
    b = std::clamp(b, 0, nbins - 1);
    bins[static_cast<std::size_t>(b)].mean_purity += t.purity;
    bins[static_cast<std::size_t>(b)].count += 1;
  }
  for (auto& b : bins)
    if (b.count > 0) b.mean_purity /= static_cast<double>(b.count);
  return bins;
}

}  // namespace catprobe

#endif
