#ifndef CATPROBE_COHERENT_HPP
#define CATPROBE_COHERENT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catprobe/params.hpp"
#include "catprobe/record.hpp"
#include "catprobe/rng.hpp"
#include "catprobe/spin.hpp"

namespace catprobe {

// ---------------------------------------------------------------------------
// Cavity amplitudes conditioned on the atomic eigenvalue n.
//
// The cavity mode conditioned on |n> stays coherent; its amplitude obeys
//   d alpha_n/dt = sqrt(kappa1) beta - (kappa/2 + i n g_tilde) alpha_n
// independently of the detection record.
// ---------------------------------------------------------------------------

inline cd alpha_decay_rate(const PhysicalParams& p, double n) {
  return cd(0.5 * p.kappa(), n * p.g_tilde());
}

// Steady-state amplitude for a constant real drive. Written in the
// rationalized form so alpha_n and alpha_{-n} are exact conjugates in
// floating point.
inline cd alpha_steady(const PhysicalParams& p, double n) {
  const double k = p.kappa();
  const double r = 2.0 * n * p.g_tilde() / k;
  const double denom = 1.0 + r * r;
  const cd pref = 2.0 * std::sqrt(p.kappa1) * p.beta / k;
  return pref * cd(1.0 / denom, -r / denom);
}

// Transient amplitude from vacuum at t = 0 under a constant drive.
inline cd alpha_transient(const PhysicalParams& p, double n, double t) {
  if (t < 0.0) throw std::invalid_argument("alpha_transient: t < 0");
  const cd lam = alpha_decay_rate(p, n);
  return std::sqrt(p.kappa1) * p.beta * (1.0 - std::exp(-lam * t)) / lam;
}

// General drive profile, by composite-Simpson quadrature of the response
// integral. Only needed for non-piecewise-constant profiles; the constant
// case above is exact.
inline cd alpha_transient_quadrature(const PhysicalParams& p, double n, double t,
                                     const std::function<cd(double)>& beta_of_t,
                                     int panels = 2000) {
  if (t <= 0.0) return cd(0.0, 0.0);
  const cd lam = alpha_decay_rate(p, n);
  const double h = t / (2 * panels);
  cd acc(0.0, 0.0);
  auto f = [&](double tp) { return std::exp(-lam * (t - tp)) * beta_of_t(tp); };
  for (int i = 0; i < panels; ++i) {
    const double a = 2 * i * h;
    acc += f(a) + 4.0 * f(a + h) + f(a + 2 * h);
  }
  return std::sqrt(p.kappa1) * acc * h / 3.0;
}

struct AmplitudeSet {
  enum class Mode { steady, transient };
  double big_j = 0.0;
  Mode mode = Mode::steady;
  double time = 0.0;
  Eigen::VectorXcd alpha;

  int dim() const { return static_cast<int>(alpha.size()); }
  double n_of(int i) const { return static_cast<double>(i) - big_j; }
};

inline AmplitudeSet amplitude_set(const PhysicalParams& p, AmplitudeSet::Mode mode,
                                  double t = 0.0) {
  SpinBasis basis(p.big_j);
  AmplitudeSet s;
  s.big_j = p.big_j;
  s.mode = mode;
  s.time = t;
  s.alpha.resize(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const double n = basis.n_of(i);
    s.alpha(i) = (mode == AmplitudeSet::Mode::steady) ? alpha_steady(p, n)
                                                      : alpha_transient(p, n, t);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Exponent bookkeeping for the exact conditional solution.
//
// Every weight is assembled from four ingredients per (n,m):
//   P(n,m)  = int alpha_n alpha_m^* dt
//   Q2(n)   = int alpha_n^2 dt
//   A(n)    = int alpha_n dt
//   S(n)    = sum_k alpha_n(t_{k-1}) dy_k        (Ito, left endpoint)
// In steady mode these are closed-form; in transient mode the dt-integrals
// use the trapezoid rule on the record grid (they then match the
// second-order stochastic integrators on the same grid) with the geometric
// sums evaluated in closed form, and the dy-sum is accumulated per n.
// ---------------------------------------------------------------------------

class ExponentEngine {
 public:
  // drive_off_step >= 0 switches the drive off at grid point k1 (transient
  // mode only): the amplitudes then ring down freely while the detector keeps
  // running over the rest of the record.
  ExponentEngine(const PhysicalParams& p, const MeasurementRecord& rec, bool steady,
                 long drive_off_step = -1)
      : p_(p), basis_(p.big_j), steady_(steady), dt_(rec.dt),
        m_steps_(static_cast<int>(rec.steps())) {
    if (std::abs(p.beta.imag()) > 1e-12 * (std::abs(p.beta) + 1.0))
      throw std::invalid_argument("conditional dynamics require a real drive amplitude");
    k1_ = drive_off_step >= 0 ? static_cast<int>(drive_off_step) : m_steps_;
    if (k1_ > m_steps_)
      throw std::invalid_argument("drive-off step beyond the end of the record");
    if (steady_ && k1_ != m_steps_)
      throw std::invalid_argument("drive-off modelling requires transient mode");
    t_ = rec.duration();
    t1_ = dt_ * k1_;
    y_ = rec.integrated();
    const int d = basis_.dim();
    lam_.resize(d);
    cpre_.resize(d);
    aoff_.resize(d);
    alpha_t_.resize(d);
    alpha_ss_.resize(d);
    dy_geom_a_.assign(static_cast<std::size_t>(d), cd(0.0, 0.0));
    dy_geom_b_.assign(static_cast<std::size_t>(d), cd(0.0, 0.0));
    dy_head_ = 0.0;
    for (int k = 0; k < k1_; ++k) dy_head_ += rec.dy[static_cast<std::size_t>(k)];
    for (int i = 0; i < d; ++i) {
      const double n = basis_.n_of(i);
      lam_[i] = alpha_decay_rate(p, n);
      cpre_[i] = std::sqrt(p.kappa1) * p.beta / lam_[i];
      aoff_[i] = cpre_[i] * (1.0 - std::exp(-lam_[i] * t1_));  // alpha at switch-off
      alpha_ss_[i] = alpha_steady(p, n);
      alpha_t_[i] = steady_ ? alpha_ss_[i]
                            : (k1_ == m_steps_
                                   ? alpha_transient(p, n, t_)
                                   : aoff_[i] * std::exp(-lam_[i] * (t_ - t1_)));
    }
    if (!steady_ && m_steps_ > 0) {
      // one pass per n: sum exp(-lambda_n t_{k-1}) dy_k over each phase
      for (int i = 0; i < d; ++i) {
        const cd r = std::exp(-lam_[i] * dt_);
        cd w(1.0, 0.0);
        cd acc_a(0.0, 0.0), acc_b(0.0, 0.0);
        for (int k = 0; k < m_steps_; ++k) {
          if (k < k1_)
            acc_a += w * rec.dy[static_cast<std::size_t>(k)];
          else if (k == k1_)
            w = cd(1.0, 0.0);  // restart the clock at the switch-off
          if (k >= k1_) acc_b += w * rec.dy[static_cast<std::size_t>(k)];
          w *= r;
        }
        dy_geom_a_[static_cast<std::size_t>(i)] = acc_a;
        dy_geom_b_[static_cast<std::size_t>(i)] = acc_b;
      }
    }
  }

  const SpinBasis& basis() const { return basis_; }
  double duration() const { return t_; }
  double integrated_y() const { return y_; }
  cd alpha_final(int i) const { return alpha_t_[i]; }

  // int alpha_n alpha_m^* dt
  cd p_int(int i, int k) const {
    if (steady_) return alpha_ss_[i] * std::conj(alpha_ss_[k]) * t_;
    const cd ln = lam_[i], lm = std::conj(lam_[k]);
    cd acc = cpre_[i] * std::conj(cpre_[k]) *
             (trap_a(cd(0, 0)) - trap_a(ln) - trap_a(lm) + trap_a(ln + lm));
    if (k1_ < m_steps_) acc += aoff_[i] * std::conj(aoff_[k]) * trap_b(ln + lm);
    return acc;
  }

  // int alpha_n^2 dt
  cd q2_int(int i) const {
    if (steady_) return alpha_ss_[i] * alpha_ss_[i] * t_;
    const cd ln = lam_[i];
    cd acc = cpre_[i] * cpre_[i] *
             (trap_a(cd(0, 0)) - 2.0 * trap_a(ln) + trap_a(2.0 * ln));
    if (k1_ < m_steps_) acc += aoff_[i] * aoff_[i] * trap_b(2.0 * ln);
    return acc;
  }

  // int alpha_n dt
  cd a_int(int i) const {
    if (steady_) return alpha_ss_[i] * t_;
    cd acc = cpre_[i] * (trap_a(cd(0, 0)) - trap_a(lam_[i]));
    if (k1_ < m_steps_) acc += aoff_[i] * trap_b(lam_[i]);
    return acc;
  }

  // int beta(t) alpha_n dt / beta: the drive-weighted amplitude integral,
  // which only collects the driven phase
  cd a_int_driven(int i) const {
    if (steady_) return alpha_ss_[i] * t_;
    return cpre_[i] * (trap_a(cd(0, 0)) - trap_a(lam_[i]));
  }

  // sum alpha_n(t_{k-1}) dy_k
  cd s_dy(int i) const {
    if (steady_) return alpha_ss_[i] * y_;
    cd acc = cpre_[i] * (dy_head_ - dy_geom_a_[static_cast<std::size_t>(i)]);
    if (k1_ < m_steps_) acc += aoff_[i] * dy_geom_b_[static_cast<std::size_t>(i)];
    return acc;
  }

  // Full complex exponent of the conditional (n,m) weight, excluding the
  // field-overlap factor and the normalization.
  cd exponent(int i, int k) const {
    const double ek1 = p_.eta * p_.kappa1;
    const cd pnn = p_int(i, i), pmm = p_int(k, k), pnm = p_int(i, k);
    const cd sn = s_dy(i), sm = s_dy(k);
    const cd qn = q2_int(i), qm = q2_int(k);
    const cd an = a_int_driven(i), am = a_int_driven(k);
    cd e = -0.5 * p_.kappa() * (pnn + pmm - 2.0 * pnm);
    e += std::sqrt(ek1) * (sn + std::conj(sm));
    e += -0.5 * ek1 * (qn + 2.0 * pnm + std::conj(qm));
    e += -0.5 * std::sqrt(p_.kappa1) * p_.beta.real() *
         ((an - std::conj(an)) - (am - std::conj(am)));
    return e;
  }

  // log <alpha_m(t) | alpha_n(t)>
  cd log_overlap(int i, int k) const {
    const cd an = alpha_t_[i], am = alpha_t_[k];
    return -0.5 * (std::norm(an) + std::norm(am)) + an * std::conj(am);
  }

 private:
  // Trapezoid sum of exp(-lambda t) over n uniform steps, closed form.
  cd trap_n(const cd& lam, int n) const {
    if (n <= 0) return cd(0.0, 0.0);
    if (lam == cd(0.0, 0.0)) return dt_ * static_cast<double>(n);
    const cd r = std::exp(-lam * dt_);
    const cd rm = std::exp(-lam * (dt_ * n));
    // sum_{k=0..n} r^k = (1 - r^{n+1})/(1 - r)
    const cd full = (1.0 - rm * r) / (1.0 - r);
    return dt_ * (full - 0.5 * (1.0 + rm));
  }
  cd trap_a(const cd& lam) const { return trap_n(lam, k1_); }
  cd trap_b(const cd& lam) const { return trap_n(lam, m_steps_ - k1_); }

  PhysicalParams p_;
  SpinBasis basis_;
  bool steady_;
  double dt_, t_ = 0.0, t1_ = 0.0, y_ = 0.0, dy_head_ = 0.0;
  int m_steps_;
  int k1_ = 0;
  std::vector<cd> lam_, cpre_, aoff_, alpha_t_, alpha_ss_, dy_geom_a_, dy_geom_b_;
};

// ---------------------------------------------------------------------------
// Conditional state, record statistics, purity
// ---------------------------------------------------------------------------

struct ConditionalResult {
  AtomicDensityMatrix rho_at;
  Eigen::VectorXd diagonal_weights;  // normalized
  AmplitudeSet amplitudes;
};

namespace detail {
inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}
}  // namespace detail

// Exact conditional density operator of the atoms given a record, traced over
// the cavity field. All weights are accumulated in log space; probe_off drops
// the field-overlap factor (field returned to vacuum before readout).
inline ConditionalResult conditional_state(const PhysicalParams& p,
                                           const AtomicCoefficients& coeffs,
                                           const MeasurementRecord& rec,
                                           bool steady = true,
                                           bool probe_off = false,
                                           long drive_off_step = -1) {
  ExponentEngine eng(p, rec, steady, drive_off_step);
  const int d = eng.basis().dim();
  if (coeffs.dim() != d)
    throw std::invalid_argument("conditional_state: coefficient dimension mismatch");

  // normalization over the diagonal
  std::vector<double> diag_lw(static_cast<std::size_t>(d),
                              -std::numeric_limits<double>::infinity());
  for (int q = 0; q < d; ++q) {
    const double cq = coeffs.c(q, q).real();
    if (cq > 0.0) diag_lw[static_cast<std::size_t>(q)] =
        std::log(cq) + eng.exponent(q, q).real();
  }
  const double log_d = detail::log_sum_exp(diag_lw);
  if (!std::isfinite(log_d)) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : diag_lw) mx = std::max(mx, v);
    throw std::runtime_error(
        "conditional_state: degenerate normalization, largest diagonal log-weight = " +
        std::to_string(mx));
  }

  ConditionalResult out;
  out.rho_at.big_j = p.big_j;
  out.rho_at.rho.resize(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k <= i; ++k) {
      const cd cnm = coeffs.c(i, k);
      cd v(0.0, 0.0);
      if (cnm != cd(0.0, 0.0)) {
        cd ex = eng.exponent(i, k) - log_d;
        if (!probe_off) ex += eng.log_overlap(i, k);
        v = cnm * std::exp(ex);
      }
      out.rho_at.rho(i, k) = v;
      out.rho_at.rho(k, i) = std::conj(v);
    }
  }
  out.diagonal_weights = out.rho_at.rho.diagonal().real();
  out.amplitudes = amplitude_set(
      p, steady ? AmplitudeSet::Mode::steady : AmplitudeSet::Mode::transient,
      eng.duration());
  return out;
}

// Probability density of the integrated record Y after probing time t in the
// steady regime: a (2J+1)-component Gaussian mixture with common variance t.
struct RecordDistribution {
  Eigen::VectorXd means;
  Eigen::VectorXd weights;
  double variance = 0.0;

  double pdf(double y) const {
    const double s2 = variance;
    double acc = 0.0;
    for (int q = 0; q < means.size(); ++q) {
      const double z = y - means(q);
      acc += weights(q) * std::exp(-0.5 * z * z / s2);
    }
    return acc / std::sqrt(2.0 * pi * s2);
  }

  double cdf(double y) const {
    double acc = 0.0;
    const double s = std::sqrt(2.0 * variance);
    for (int q = 0; q < means.size(); ++q)
      acc += weights(q) * 0.5 * (1.0 + std::erf((y - means(q)) / s));
    return acc;
  }
};

inline RecordDistribution record_probability_y(const PhysicalParams& p,
                                               const AtomicCoefficients& coeffs,
                                               double t) {
  if (!(t > 0.0)) throw std::invalid_argument("record_probability_y: t must be positive");
  SpinBasis basis(p.big_j);
  const int d = basis.dim();
  RecordDistribution dist;
  dist.means.resize(d);
  dist.weights.resize(d);
  dist.variance = t;
  const double pref = 2.0 * std::sqrt(p.eta * p.kappa1);
  for (int q = 0; q < d; ++q) {
    dist.means(q) = pref * alpha_steady(p, basis.n_of(q)).real() * t;
    dist.weights(q) = coeffs.c(q, q).real();
  }
  dist.weights /= dist.weights.sum();
  return dist;
}

// Sample a record of M = t/dt homodyne increments in the steady regime:
// draw the atomic component q from the diagonal weights, then
//   dy_k = 2 sqrt(eta kappa1) Re(alpha_q) dt + dW_k.
// For a diagonal initial mixture this reproduces the exact joint record
// density; records carry no information about initial coherences, so it is
// valid for arbitrary initial states with the same diagonal.
inline MeasurementRecord sample_record(const PhysicalParams& p,
                                       const AtomicCoefficients& coeffs,
                                       double t, double dt, std::uint64_t seed) {
  const double m_real = t / dt;
  const long m = std::lround(m_real);
  if (m <= 0 || std::abs(m_real - static_cast<double>(m)) > 1e-9)
    throw std::invalid_argument("sample_record: dt must divide t");
  SpinBasis basis(p.big_j);
  GaussianRng rng(seed);
  std::vector<double> w(static_cast<std::size_t>(basis.dim()));
  for (int q = 0; q < basis.dim(); ++q) w[static_cast<std::size_t>(q)] = coeffs.c(q, q).real();
  const std::size_t q = rng.pick(w);
  const double drift =
      2.0 * std::sqrt(p.eta * p.kappa1) *
      alpha_steady(p, basis.n_of(static_cast<int>(q))).real() * dt;
  MeasurementRecord rec;
  rec.dt = dt;
  rec.rng_seed = seed;
  rec.dy.resize(static_cast<std::size_t>(m));
  const double sdt = std::sqrt(dt);
  for (long k = 0; k < m; ++k)
    rec.dy[static_cast<std::size_t>(k)] = drift + sdt * rng.normal();
  return rec;
}

// Purity of the atomic state for an initial equal pure superposition of
// |n> and |-n> in the steady probing regime (record terms cancel).
inline double purity_two_state(const PhysicalParams& p, double n, double t) {
  const double gt = p.g_tilde();
  const double k = p.kappa();
  const double denom = 0.25 * k * k + n * n * gt * gt;
  const double x = 4.0 * p.kappa1 * std::norm(p.beta) * n * n * gt * gt / (denom * denom);
  return 0.5 * (1.0 + std::exp(-x * ((k - p.eta * p.kappa1) * t + 1.0)));
}

// Full conditional purity Tr(rho_at^2). Assembled from the closed-form
// exponent combination rather than by squaring the conditional state, so the
// two routes can be cross-checked against each other.
inline double purity_full(const PhysicalParams& p, const AtomicCoefficients& coeffs,
                          const MeasurementRecord& rec, bool steady = true,
                          bool probe_off = false, long drive_off_step = -1) {
  ExponentEngine eng(p, rec, steady, drive_off_step);
  const int d = eng.basis().dim();
  if (coeffs.dim() != d)
    throw std::invalid_argument("purity_full: coefficient dimension mismatch");

  std::vector<double> diag_lw(static_cast<std::size_t>(d),
                              -std::numeric_limits<double>::infinity());
  std::vector<double> sdy(static_cast<std::size_t>(d));
  std::vector<double> re2(static_cast<std::size_t>(d));
  std::vector<double> pr(static_cast<std::size_t>(d));
  for (int q = 0; q < d; ++q) {
    sdy[static_cast<std::size_t>(q)] = eng.s_dy(q).real();
    // int Re(alpha_q)^2 dt = (Q2 + 2 P + conj(Q2))/4
    re2[static_cast<std::size_t>(q)] =
        0.25 * (2.0 * eng.q2_int(q).real() + 2.0 * eng.p_int(q, q).real());
    pr[static_cast<std::size_t>(q)] = eng.p_int(q, q).real();
    const double cq = coeffs.c(q, q).real();
    if (cq > 0.0)
      diag_lw[static_cast<std::size_t>(q)] =
          std::log(cq) + eng.exponent(q, q).real();
  }
  const double log_d = detail::log_sum_exp(diag_lw);
  if (!std::isfinite(log_d))
    throw std::runtime_error("purity_full: degenerate normalization");

  const double ek1 = p.eta * p.kappa1;
  const double sek1 = std::sqrt(ek1);
  double purity = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double cabs = std::abs(coeffs.c(i, k));
      if (cabs == 0.0) continue;
      const cd dalpha = eng.alpha_final(i) - eng.alpha_final(k);
      const double int_diff =
          pr[static_cast<std::size_t>(i)] + pr[static_cast<std::size_t>(k)] -
          2.0 * eng.p_int(i, k).real();
      double ex = -(p.kappa() - ek1) * int_diff;
      if (!probe_off) ex -= std::norm(dalpha);
      ex += 2.0 * sek1 * (sdy[static_cast<std::size_t>(i)] + sdy[static_cast<std::size_t>(k)]);
      ex += -2.0 * ek1 * (re2[static_cast<std::size_t>(i)] + re2[static_cast<std::size_t>(k)]);
      purity += std::exp(2.0 * std::log(cabs) + ex - 2.0 * log_d);
    }
  }
  return purity;
}

// ---------------------------------------------------------------------------
// Peak-position estimator (large-N Gaussian regime).
//
// With u = 1 + 4 g_tilde^2 n^2 / kappa^2, the stationarity condition of the
// log diagonal weight is the depressed cubic
//   u^3 + (a b Y) u - 2 a^2 b t = 0,
//   a = sqrt(eta kappa1) 2 sqrt(kappa1) |beta| / kappa,  b = 4 g_tilde^2 N / kappa^2,
// whose unique positive root gives n_p. The closed Cardano form is used when
// well-conditioned, with a bracketed fallback.
// ---------------------------------------------------------------------------

struct PeakEstimate {
  double n_p = 0.0;
  bool single_peaked = false;
};

namespace detail {
inline double positive_root_depressed_cubic(double pc, double qc) {
  // f(u) = u^3 + pc u + qc with qc < 0: exactly one positive real root.
  double u = std::numeric_limits<double>::quiet_NaN();
  const double disc = 0.25 * qc * qc + pc * pc * pc / 27.0;
  if (disc >= 0.0) {
    const double c3 = -0.5 * qc + std::sqrt(disc);
    const double c = std::cbrt(c3);
    if (c > 0.0) u = c - pc / (3.0 * c);
  } else {
    // three real roots; the largest is the positive one
    const double r = 2.0 * std::sqrt(-pc / 3.0);
    const double arg = std::clamp(3.0 * qc / (pc * r), -1.0, 1.0);
    u = r * std::cos(std::acos(arg) / 3.0);
  }
  auto f = [&](double x) { return x * x * x + pc * x + qc; };
  auto fp = [&](double x) { return 3.0 * x * x + pc; };
  const double scale = std::abs(qc) + std::abs(pc) + 1.0;
  if (!std::isfinite(u) || u <= 0.0 || std::abs(f(u)) > 1e-6 * scale) {
    double lo = 0.0;
    double hi = std::max({2.0, 1.5 * std::cbrt(-qc), pc < 0.0 ? 1.5 * std::sqrt(-pc) : 0.0});
    while (f(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
      if (hi - lo < 1e-14 * hi) break;
    }
    u = 0.5 * (lo + hi);
  }
  for (int it = 0; it < 50; ++it) {
    const double step = f(u) / fp(u);
    u -= step;
    if (std::abs(step) < 1e-15 * std::abs(u)) break;
  }
  return u;
}
}  // namespace detail

inline PeakEstimate peak_estimate(const PhysicalParams& p, double big_j, double t,
                                  double y) {
  if (!(t > 0.0)) throw std::invalid_argument("peak_estimate: t must be positive");
  const double k = p.kappa();
  const double n_at = 2.0 * big_j;
  const double a = std::sqrt(p.eta * p.kappa1) * 2.0 * std::sqrt(p.kappa1) *
                   std::abs(p.beta) / k;
  const double gt = p.g_tilde();
  const double b = 4.0 * gt * gt * n_at / (k * k);
  const double pc = a * b * y;
  const double qc = -2.0 * a * a * b * t;
  PeakEstimate out;
  if (qc >= 0.0) {  // no drive or no detection: flat stationarity condition
    out.single_peaked = true;
    return out;
  }
  const double u = detail::positive_root_depressed_cubic(pc, qc);
  if (u <= 1.0) {
    out.single_peaked = true;
    out.n_p = 0.0;
    return out;
  }
  out.n_p = std::sqrt(n_at * (u - 1.0) / b);
  return out;
}

}  // namespace catprobe

#endif
