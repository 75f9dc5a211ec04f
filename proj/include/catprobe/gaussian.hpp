#ifndef CATPROBE_GAUSSIAN_HPP
#define CATPROBE_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "catprobe/params.hpp"
#include "catprobe/record.hpp"
#include "catprobe/rng.hpp"
#include "catprobe/spin.hpp"

namespace catprobe {

using Eigen::Matrix4cd;
using Eigen::Vector4cd;
using Eigen::Vector4d;

// ---------------------------------------------------------------------------
// Gaussian-component representation of the cascaded-cavity master equation.
//
// The joint state is expanded as rho = sum_nm rho_nm |n><m| with each two-mode
// field operator rho_nm represented by a Gaussian phase-space function
//   W_nm(y) = N_nm / (pi^2 sqrt(det V_nm)) exp[-(y - ybar)^T V^-1 (y - ybar)],
//   y = (x1, p1, x2, p2),  vacuum V = identity,  x = (a + a^dag)/sqrt(2).
//
// Mapping the master equation onto this family gives, per component, with
// Q = q diag(1,1,0,0):
//   dV/dt    = V Q V - A V - V A^T + F2 - 2 s s^T,        s = (V - 1) b
//   dybar    = [V Q ybar - A ybar - e - sc s] dt + s dW,  sc = 2 b.ybar - mu
//   d ln N   = [s0 + ybar.Q ybar + q (V00+V11)/2 - sc^2/2] dt + sc dW
// where mu = sum_q N_qq 2 b.ybar_qq is the measured mean shared by all
// components, and the homodyne increment is dy = mu dt + dW. The covariance
// flow is noise-free, so V_nm is identical across realizations.
// ---------------------------------------------------------------------------

struct FlowCoefficients {
  double kappa = 0.0, kappa_c = 0.0, g_tilde = 0.0, root_k1k2 = 0.0;
  cd epsilon{0.0, 0.0};
  Vector4cd e;  // drive vector (real entries)
  Vector4d b;   // measurement vector; zero when eta = 0
  double eta = 0.0, phi = 0.0;

  cd q_of(double n, double m) const { return cd(0.0, -0.5 * g_tilde * (n - m)); }
  cd s0_of(double n, double m) const { return cd(0.0, 0.5 * g_tilde * (n - m)); }

  Matrix4cd a_of(double n, double m) const {
    const double wbar = 0.5 * g_tilde * (n + m);
    Matrix4cd a = Matrix4cd::Zero();
    a(0, 0) = a(1, 1) = 0.5 * kappa;
    a(1, 0) = wbar;
    a(0, 1) = -wbar;
    a(2, 2) = 0.5 * kappa_c - epsilon.imag();
    a(3, 3) = 0.5 * kappa_c + epsilon.imag();
    a(2, 3) = epsilon.real();
    a(3, 2) = epsilon.real();
    a(1, 2) = -root_k1k2;
    a(0, 3) = root_k1k2;
    return a;
  }

  // F2 = twice the diffusion matrix.
  Matrix4cd f2_of(double n, double m) const {
    Matrix4cd f = Matrix4cd::Zero();
    const cd d1 = cd(kappa, 0.5 * g_tilde * (n - m));
    f(0, 0) = f(1, 1) = d1;
    f(2, 2) = f(3, 3) = kappa_c;
    f(0, 3) = f(3, 0) = root_k1k2;
    f(1, 2) = f(2, 1) = -root_k1k2;
    return f;
  }
};

// Coefficient tables of the coupled component equations for a parameter set.
inline FlowCoefficients derive_component_sdes(const PhysicalParams& p) {
  FlowCoefficients f;
  f.kappa = p.kappa();
  f.kappa_c = p.kappa_c();
  f.g_tilde = p.g_tilde();
  f.root_k1k2 = std::sqrt(p.kappa1 * p.kappa2);
  f.epsilon = p.epsilon;
  f.eta = p.eta;
  f.phi = p.phi;
  const double rk1 = std::sqrt(p.kappa1), rk2 = std::sqrt(p.kappa2);
  const double s2 = std::sqrt(2.0);
  f.e << cd(s2 * rk1 * p.beta.imag(), 0.0), cd(-s2 * rk1 * p.beta.real(), 0.0),
      cd(s2 * rk2 * p.beta.real(), 0.0), cd(s2 * rk2 * p.beta.imag(), 0.0);
  const double me1 = std::sqrt(0.5 * p.eta * p.kappa1);
  const double me2 = std::sqrt(0.5 * p.eta * p.kappa2);
  double c = std::cos(p.phi), s = std::sin(p.phi);
  // snap exact quadrature angles so phi = k pi/2 selects a quadrature exactly
  if (std::abs(s) < 1e-9) {
    s = 0.0;
    c = c > 0.0 ? 1.0 : -1.0;
  } else if (std::abs(c) < 1e-9) {
    c = 0.0;
    s = s > 0.0 ? 1.0 : -1.0;
  }
  f.b << -me1 * c, -me1 * s, me2 * s, -me2 * c;
  return f;
}

inline Matrix4cd v_flow(const FlowCoefficients& f, double n, double m,
                        const Matrix4cd& v) {
  const cd q = f.q_of(n, m);
  const Matrix4cd a = f.a_of(n, m);
  const Vector4cd v0 = v.col(0), v1 = v.col(1);
  Matrix4cd out = q * (v0 * v0.transpose() + v1 * v1.transpose());
  out.noalias() -= a * v;
  out.noalias() -= v * a.transpose();
  out += f.f2_of(n, m);
  const Vector4cd sig = (v - Matrix4cd::Identity()) * f.b.cast<cd>();
  out.noalias() -= 2.0 * (sig * sig.transpose());
  return out;
}

inline double max_component_rate(const PhysicalParams& p) {
  return std::max({p.kappa(), p.kappa_c(), std::abs(p.epsilon),
                   p.big_j * p.g_tilde()});
}

struct GaussianComponent {
  int i = 0, k = 0;    // basis indices, i >= k
  double n = 0.0, m = 0.0;
  Matrix4cd v = Matrix4cd::Identity();
  Vector4cd ybar = Vector4cd::Zero();
  cd log_weight{0.0, 0.0};  // complex log of N_nm

  // cached flow data for the current V
  Matrix4cd r;       // V Q - A
  Vector4cd sig;     // (V - 1) b
  cd s0_plus_trqv;   // s0 + q (V00 + V11)/2
  cd q;              // Q scale
  double mn_local = 0.0;  // 2 b.sig  (real by construction on the diagonal;
                          // complex part kept separately below)
  cd mn_local_c{0.0, 0.0};
};

struct GaussianOptions {
  bool steady_v = false;       // freeze V at its fixed point
  bool fold_symmetric = false; // propagate one representative per symmetry class
  bool store_full = false;     // keep both triangles instead of n >= m
  int pd_check_every = 1;      // cadence of the positive-definiteness check
};

class GaussianEnsemble {
 public:
  GaussianEnsemble() = default;

  const PhysicalParams& params() const { return params_; }
  double big_j() const { return big_j_; }
  double time() const { return time_; }
  long step_index() const { return step_index_; }
  bool folded() const { return opts_.fold_symmetric; }
  const MeasurementRecord& record() const { return record_; }
  MeasurementRecord& record() { return record_; }
  const std::vector<GaussianComponent>& components() const { return comps_; }
  std::vector<GaussianComponent>& components() { return comps_; }
  const FlowCoefficients& flows() const { return flows_; }
  const GaussianOptions& options() const { return opts_; }

  int dim() const { return basis_dim_; }
  double n_of(int i) const { return static_cast<double>(i) - big_j_; }

  // component position for basis pair (i, k), i >= k; -1 if not stored
  int position(int i, int k) const { return pos_[static_cast<std::size_t>(i * basis_dim_ + k)]; }

  friend GaussianEnsemble make_ensemble(const PhysicalParams&, const AtomicCoefficients&,
                                        const GaussianOptions&);
  friend void set_ensemble_params(GaussianEnsemble&, const PhysicalParams&);
  friend void step(GaussianEnsemble&, double, double);

  // Weighted measured means filled in canonical (ascending q) order; used for
  // mu and the renormalization so folded and unfolded runs agree bitwise.
  double measured_mean_and_norm(bool predicted, double* norm_out) const;

 private:
  PhysicalParams params_;
  GaussianOptions opts_;
  FlowCoefficients flows_;
  double big_j_ = 0.0;
  int basis_dim_ = 0;
  double time_ = 0.0;
  long step_index_ = 0;
  double dt_bound_ = 0.0;
  std::vector<GaussianComponent> comps_;
  std::vector<int> pos_;
  std::vector<int> diag_pos_;  // position of (q,q) for q ascending (mirror-resolved)
  MeasurementRecord record_;

  // per-step scratch
  struct Scratch {
    Vector4cd yp;
    cd lnp;
    Vector4cd drift_y0;
    cd drift_n0;
    cd sc0;
    cd milstein;
    Matrix4cd vc;
  };
  std::vector<Scratch> scratch_;

  void rebuild_cache(GaussianComponent& c) const {
    const cd q = flows_.q_of(c.n, c.m);
    c.q = q;
    const Matrix4cd a = flows_.a_of(c.n, c.m);
    Matrix4cd vq = Matrix4cd::Zero();
    vq.col(0) = q * c.v.col(0);
    vq.col(1) = q * c.v.col(1);
    c.r = vq - a;
    c.sig = (c.v - Matrix4cd::Identity()) * flows_.b.cast<cd>();
    c.s0_plus_trqv = flows_.s0_of(c.n, c.m) + 0.5 * q * (c.v(0, 0) + c.v(1, 1));
    cd bs(0.0, 0.0);
    for (int a4 = 0; a4 < 4; ++a4) bs += flows_.b(a4) * c.sig(a4);
    c.mn_local_c = 2.0 * bs;
    c.mn_local = c.mn_local_c.real();
  }
};

inline double GaussianEnsemble::measured_mean_and_norm(bool predicted,
                                                       double* norm_out) const {
  double mu = 0.0, norm = 0.0;
  for (int q = 0; q < basis_dim_; ++q) {
    const int pos = diag_pos_[static_cast<std::size_t>(q)];
    if (pos < 0) continue;
    const GaussianComponent& c = comps_[static_cast<std::size_t>(pos)];
    const cd lw = predicted ? scratch_[static_cast<std::size_t>(pos)].lnp : c.log_weight;
    const double w = std::exp(lw.real()) * std::cos(lw.imag());
    const Vector4cd& y = predicted ? scratch_[static_cast<std::size_t>(pos)].yp : c.ybar;
    double by = 0.0;
    for (int a = 0; a < 4; ++a) by += flows_.b(a) * y(a).real();
    mu += w * 2.0 * by;
    norm += w;
  }
  if (norm_out) *norm_out = norm;
  return mu;
}

inline GaussianEnsemble make_ensemble(const PhysicalParams& p,
                                      const AtomicCoefficients& coeffs,
                                      const GaussianOptions& opts = {}) {
  SpinBasis basis(p.big_j);
  const int d = basis.dim();
  if (coeffs.dim() != d)
    throw std::invalid_argument("make_ensemble: coefficient dimension mismatch");
  if (opts.fold_symmetric) {
    const double sphi = std::abs(std::remainder(p.phi, pi));
    if (sphi > 1e-12 || p.beta.real() != 0.0 || p.epsilon.real() != 0.0)
      throw std::invalid_argument(
          "make_ensemble: symmetric folding requires phi = k pi and purely "
          "imaginary beta and epsilon");
  }

  GaussianEnsemble ens;
  ens.params_ = p;
  ens.opts_ = opts;
  ens.flows_ = derive_component_sdes(p);
  ens.big_j_ = p.big_j;
  ens.basis_dim_ = d;
  ens.dt_bound_ = 0.01 / max_component_rate(p);
  ens.pos_.assign(static_cast<std::size_t>(d) * d, -1);
  ens.diag_pos_.assign(static_cast<std::size_t>(d), -1);

  if (opts.store_full && opts.fold_symmetric)
    throw std::invalid_argument("make_ensemble: store_full excludes folding");
  for (int i = 0; i < d; ++i) {
    const int k_hi = opts.store_full ? d - 1 : i;
    for (int k = 0; k <= k_hi; ++k) {
      if (opts.fold_symmetric && i + k < d - 1) continue;  // mirror of a stored pair
      const cd c0 = coeffs.c(i, k);
      if (c0 == cd(0.0, 0.0)) continue;
      GaussianComponent c;
      c.i = i;
      c.k = k;
      c.n = basis.n_of(i);
      c.m = basis.n_of(k);
      c.log_weight = std::log(c0);
      ens.pos_[static_cast<std::size_t>(i * d + k)] =
          static_cast<int>(ens.comps_.size());
      ens.comps_.push_back(c);
    }
  }
  for (int q = 0; q < d; ++q) {
    int pos = ens.pos_[static_cast<std::size_t>(q * d + q)];
    if (pos < 0 && opts.fold_symmetric) {
      const int qm = d - 1 - q;
      pos = ens.pos_[static_cast<std::size_t>(qm * d + qm)];
    }
    ens.diag_pos_[static_cast<std::size_t>(q)] = pos;
  }

  if (opts.steady_v) {
    for (auto& c : ens.comps_) {
      // relax the noise-free covariance flow onto its fixed point
      const double rate = max_component_rate(p);
      const double dtv = 0.02 / rate;
      for (int it = 0; it < 2000000; ++it) {
        const Matrix4cd k1 = v_flow(ens.flows_, c.n, c.m, c.v);
        if (it % 16 == 0 && k1.cwiseAbs().maxCoeff() < 1e-10 * rate) break;
        const Matrix4cd vp = c.v + dtv * k1;
        c.v += 0.5 * dtv * (k1 + v_flow(ens.flows_, c.n, c.m, vp));
        c.v = 0.5 * (c.v + c.v.transpose()).eval();
      }
    }
  }
  for (auto& c : ens.comps_) ens.rebuild_cache(c);
  ens.scratch_.resize(ens.comps_.size());
  return ens;
}

// Swap in new parameters mid-run (probe/squeezing switch-off). The covariance
// is no longer at its old fixed point, so frozen-V mode reverts to evolving.
inline void set_ensemble_params(GaussianEnsemble& ens, const PhysicalParams& p) {
  if (ens.opts_.fold_symmetric) {
    const double sphi = std::abs(std::remainder(p.phi, pi));
    if (sphi > 1e-12 || p.beta.real() != 0.0 || p.epsilon.real() != 0.0)
      throw std::invalid_argument("set_ensemble_params: new parameters break the fold symmetry");
  }
  ens.params_ = p;
  ens.flows_ = derive_component_sdes(p);
  ens.dt_bound_ = 0.01 / max_component_rate(p);
  ens.opts_.steady_v = false;
  for (auto& c : ens.comps_) ens.rebuild_cache(c);
}

// One step of the weak second-order derivative-free predictor-corrector:
// trapezoidal correction of the drift around an Euler-Maruyama predictor,
// with the multiplicative-noise (Milstein) term of the weight equation kept
// in closed form. dW is the externally supplied Wiener increment.
inline void step(GaussianEnsemble& ens, double dw, double dt) {
  if (dt > ens.dt_bound_ * (1.0 + 1e-9))
    throw std::invalid_argument("step: dt exceeds 0.01 / max rate = " +
                                std::to_string(ens.dt_bound_));
  const FlowCoefficients& f = ens.flows_;
  const bool evolve_v = !ens.opts_.steady_v;
  const double it_ms = 0.5 * (dw * dw - dt);
  if (ens.scratch_.size() != ens.comps_.size()) ens.scratch_.resize(ens.comps_.size());

  // phase 1: shared scalars at the pre-point
  const double mu0 = ens.measured_mean_and_norm(false, nullptr);
  // shared part of the weight-noise derivative: d mu / dW
  double mshared = 0.0;
  for (int q = 0; q < ens.basis_dim_; ++q) {
    const int pos = ens.diag_pos_[static_cast<std::size_t>(q)];
    if (pos < 0) continue;
    const GaussianComponent& c = ens.comps_[static_cast<std::size_t>(pos)];
    const double w = std::exp(c.log_weight.real()) * std::cos(c.log_weight.imag());
    double by = 0.0;
    for (int a = 0; a < 4; ++a) by += f.b(a) * c.ybar(a).real();
    const double sq = 2.0 * by - mu0;
    mshared += w * (sq * 2.0 * by + c.mn_local);
  }

  // phase 2: predictor
  const std::size_t nc = ens.comps_.size();
  for (std::size_t idx = 0; idx < nc; ++idx) {
    GaussianComponent& c = ens.comps_[idx];
    GaussianEnsemble::Scratch& s = ens.scratch_[idx];

    if (evolve_v) {
      const Matrix4cd k1 = v_flow(f, c.n, c.m, c.v);
      const Matrix4cd vp = c.v + dt * k1;
      s.vc = c.v + 0.5 * dt * (k1 + v_flow(f, c.n, c.m, vp));
      s.vc = 0.5 * (s.vc + s.vc.transpose()).eval();
    } else {
      s.vc = c.v;
    }

    cd bty(0.0, 0.0);
    for (int a = 0; a < 4; ++a) bty += f.b(a) * c.ybar(a);
    s.sc0 = 2.0 * bty - mu0;
    s.drift_y0 = c.r * c.ybar - f.e - s.sc0 * c.sig;
    s.drift_n0 = c.s0_plus_trqv +
                 c.q * (c.ybar(0) * c.ybar(0) + c.ybar(1) * c.ybar(1)) -
                 0.5 * s.sc0 * s.sc0;
    s.milstein = (c.mn_local_c - mshared) * it_ms;
    s.yp = c.ybar + dt * s.drift_y0 + dw * c.sig;
    s.lnp = c.log_weight + dt * s.drift_n0 + dw * s.sc0 + s.milstein;
  }

  // phase 3: shared scalar at the predicted point
  const double mup = ens.measured_mean_and_norm(true, nullptr);

  // phase 4: corrector
  for (std::size_t idx = 0; idx < nc; ++idx) {
    GaussianComponent& c = ens.comps_[idx];
    GaussianEnsemble::Scratch& s = ens.scratch_[idx];
    if (evolve_v) {
      c.v = s.vc;
      ens.rebuild_cache(c);
    }
    cd bty(0.0, 0.0);
    for (int a = 0; a < 4; ++a) bty += f.b(a) * s.yp(a);
    const cd scp = 2.0 * bty - mup;
    const Vector4cd drift_yp = c.r * s.yp - f.e - scp * c.sig;
    const cd drift_np = c.s0_plus_trqv + c.q * (s.yp(0) * s.yp(0) + s.yp(1) * s.yp(1)) -
                        0.5 * scp * scp;
    c.ybar += 0.5 * dt * (s.drift_y0 + drift_yp) + dw * c.sig;
    c.log_weight += 0.5 * dt * (s.drift_n0 + drift_np) + dw * s.sc0 + s.milstein;
  }

  // renormalize sum of diagonal weights to one
  double norm = 0.0;
  ens.measured_mean_and_norm(false, &norm);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::runtime_error("step: weight normalization lost at step " +
                             std::to_string(ens.step_index_));
  const double lnorm = std::log(norm);
  for (auto& c : ens.comps_) c.log_weight -= lnorm;

  // positive definiteness of the diagonal covariances
  if (ens.opts_.pd_check_every > 0 &&
      ens.step_index_ % ens.opts_.pd_check_every == 0) {
    for (int q = 0; q < ens.basis_dim_; ++q) {
      const int pos = ens.diag_pos_[static_cast<std::size_t>(q)];
      if (pos < 0) continue;
      const GaussianComponent& c = ens.comps_[static_cast<std::size_t>(pos)];
      Eigen::Matrix4d vr = c.v.real();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(vr, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < 1e-9)
        throw std::runtime_error(
            "step: V_nn lost positive definiteness, n = " + std::to_string(c.n) +
            ", step " + std::to_string(ens.step_index_));
    }
  }

  ens.record_.dt = dt;
  ens.record_.dy.push_back(mu0 * dt + dw);
  ens.record_.dw.push_back(dw);
  ens.time_ += dt;
  ens.step_index_ += 1;
}

// Reduced atomic state: rho_at[n,m] = Tr_field rho_nm = N_nm, exact at any
// time under this parametrization. decay_field additionally asserts that the
// fields have in fact returned to vacuum.
inline AtomicDensityMatrix extract_atomic_state(const GaussianEnsemble& ens,
                                                bool decay_field = false) {
  if (decay_field) {
    double ynorm = 0.0, vdev = 0.0;
    for (const auto& c : ens.components()) {
      ynorm = std::max(ynorm, c.ybar.cwiseAbs().maxCoeff());
      vdev = std::max(vdev, (c.v - Matrix4cd::Identity()).cwiseAbs().maxCoeff());
    }
    if (ynorm > 1e-6 || vdev > 1e-6)
      throw std::runtime_error(
          "extract_atomic_state: field not decayed (|ybar| = " + std::to_string(ynorm) +
          ", |V - 1| = " + std::to_string(vdev) + ")");
  }
  const int d = ens.dim();
  AtomicDensityMatrix out;
  out.big_j = ens.big_j();
  out.rho = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& c : ens.components()) {
    const cd val = std::exp(c.log_weight);
    out.rho(c.i, c.k) = val;
    out.rho(c.k, c.i) = std::conj(val);
    if (ens.folded()) {
      const int im = d - 1 - c.k, km = d - 1 - c.i;  // mirror pair (-m, -n)
      out.rho(im, km) = val;
      out.rho(km, im) = std::conj(val);
    }
  }
  const double tr = out.rho.trace().real();
  if (!(tr > 0.0)) throw std::runtime_error("extract_atomic_state: nonpositive trace");
  out.rho /= tr;
  return out;
}

// Residuals of the time-reversal relations V_{-m,-n} = S V_nm S,
// ybar_{-m,-n} = S ybar_nm, N_{-m,-n} = N_nm with S = diag(1,-1,-1,1).
// Valid for phi = k pi and purely imaginary beta, epsilon.
struct SymmetryResidual {
  double v = 0.0, ybar = 0.0, weight = 0.0;
  double max() const { return std::max({v, ybar, weight}); }
};

inline SymmetryResidual check_time_reversal(const GaussianEnsemble& ens,
                                            bool enforce_preconditions = true) {
  const PhysicalParams& p = ens.params();
  if (enforce_preconditions &&
      (std::abs(std::remainder(p.phi, pi)) > 1e-9 ||
       std::abs(p.beta.real()) > 1e-12 * (1.0 + std::abs(p.beta)) ||
       std::abs(p.epsilon.real()) > 1e-12 * (1.0 + std::abs(p.epsilon))))
    throw std::invalid_argument(
        "check_time_reversal: requires phi = k pi and purely imaginary beta, epsilon");
  Vector4d sdiag;
  sdiag << 1.0, -1.0, -1.0, 1.0;
  const Eigen::Matrix4d smat = sdiag.asDiagonal();
  const int d = ens.dim();
  SymmetryResidual r;
  for (const auto& c : ens.components()) {
    const int im = d - 1 - c.k, km = d - 1 - c.i;
    int pos = ens.position(im, km);
    bool swapped = false;  // partner stored as its adjoint
    if (pos < 0 && im < km) {
      pos = ens.position(km, im);
      swapped = true;
    }
    if (pos < 0) continue;
    const GaussianComponent& cm = ens.components()[static_cast<std::size_t>(pos)];
    const Matrix4cd vm = swapped ? cm.v.conjugate() : cm.v;
    const Vector4cd ym = swapped ? cm.ybar.conjugate() : cm.ybar;
    const cd nm = std::exp(swapped ? std::conj(cm.log_weight) : cm.log_weight);
    r.v = std::max(r.v, (vm - smat * c.v * smat).cwiseAbs().maxCoeff());
    r.ybar = std::max(r.ybar, (ym - smat * c.ybar).cwiseAbs().maxCoeff());
    r.weight = std::max(r.weight, std::abs(nm - std::exp(c.log_weight)));
  }
  return r;
}

// Steady covariance of the component conditioned on |n><n|.
inline Matrix4cd steady_vnn(const PhysicalParams& p, double n) {
  const FlowCoefficients f = derive_component_sdes(p);
  const double rate = max_component_rate(p) > 0.0 ? max_component_rate(p) : 1.0;
  const double dtv = 0.02 / rate;
  Matrix4cd v = Matrix4cd::Identity();
  for (int it = 0; it < 2000000; ++it) {
    const Matrix4cd k1 = v_flow(f, n, n, v);
    if (k1.cwiseAbs().maxCoeff() < 1e-10 * rate) return v;
    const Matrix4cd vp = v + dtv * k1;
    v += 0.5 * dtv * (k1 + v_flow(f, n, n, vp));
    v = 0.5 * (v + v.transpose()).eval();
  }
  throw std::runtime_error("steady_vnn: covariance flow failed to converge");
}

// Principal-axis summary of the cavity-1 marginal of the steady V_nn.
struct UncertaintyEllipse {
  double semi_major = 0.0, semi_minor = 0.0;
  double angle = 0.0;  // major-axis angle from the x1 axis
  Eigen::Matrix2d block;
};

inline UncertaintyEllipse uncertainty_ellipse(const PhysicalParams& p, double n) {
  const Matrix4cd v = steady_vnn(p, n);
  UncertaintyEllipse e;
  e.block = v.topLeftCorner<2, 2>().real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e.block);
  const double l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
  e.semi_minor = std::sqrt(std::max(0.0, l0));
  e.semi_major = std::sqrt(std::max(0.0, l1));
  e.angle = std::atan2(es.eigenvectors()(1, 1), es.eigenvectors()(0, 1));
  return e;
}

}  // namespace catprobe

#endif
