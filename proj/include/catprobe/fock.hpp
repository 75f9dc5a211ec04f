#ifndef CATPROBE_FOCK_HPP
#define CATPROBE_FOCK_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "catprobe/params.hpp"
#include "catprobe/record.hpp"
#include "catprobe/spin.hpp"

namespace catprobe {

// ---------------------------------------------------------------------------
// Brute-force integration of the conditional master equation in a truncated
// joint basis (atomic n) x (Fock mode 1) x (Fock mode 2). Ground truth for
// the analytic and Gaussian modules at small J; never a production path.
// ---------------------------------------------------------------------------

using SparseCd = Eigen::SparseMatrix<cd>;

struct TruncatedState {
  double big_j = 0.0;
  int n1 = 0, n2 = 0;  // Fock cutoffs (dimension per mode)
  Eigen::MatrixXcd rho;

  int atom_dim() const { return static_cast<int>(std::lround(2.0 * big_j)) + 1; }
  int dim() const { return atom_dim() * n1 * n2; }
  int index(int ia, int i1, int i2) const { return (ia * n1 + i1) * n2 + i2; }

  static TruncatedState from_coefficients(const AtomicCoefficients& coeffs,
                                          int n1, int n2) {
    TruncatedState s;
    s.big_j = coeffs.big_j;
    s.n1 = n1;
    s.n2 = n2;
    s.rho = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
    const int da = s.atom_dim();
    for (int ia = 0; ia < da; ++ia)
      for (int ja = 0; ja < da; ++ja)
        s.rho(s.index(ia, 0, 0), s.index(ja, 0, 0)) = coeffs.c(ia, ja);
    return s;
  }

  // Partial trace over both field modes.
  AtomicDensityMatrix atomic_density() const {
    const int da = atom_dim();
    AtomicDensityMatrix out;
    out.big_j = big_j;
    out.rho = Eigen::MatrixXcd::Zero(da, da);
    for (int ia = 0; ia < da; ++ia)
      for (int ja = 0; ja < da; ++ja) {
        cd acc(0.0, 0.0);
        for (int i1 = 0; i1 < n1; ++i1)
          for (int i2 = 0; i2 < n2; ++i2)
            acc += rho(index(ia, i1, i2), index(ja, i1, i2));
        out.rho(ia, ja) = acc;
      }
    return out;
  }

  // <a_mode> conditioned on the atomic eigenvalue with basis index ia.
  cd conditional_mode1_mean(int ia) const {
    cd num(0.0, 0.0), den(0.0, 0.0);
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        den += rho(index(ia, i1, i2), index(ia, i1, i2));
        if (i1 + 1 < n1)
          num += std::sqrt(i1 + 1.0) * rho(index(ia, i1 + 1, i2), index(ia, i1, i2));
      }
    return num / den;
  }

  cd mode2_mean() const {
    cd acc(0.0, 0.0);
    const int da = atom_dim();
    for (int ia = 0; ia < da; ++ia)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 + 1 < n2; ++i2)
          acc += std::sqrt(i2 + 1.0) * rho(index(ia, i1, i2 + 1), index(ia, i1, i2));
    return acc;
  }

  cd mode1_mean() const {
    cd acc(0.0, 0.0);
    const int da = atom_dim();
    for (int ia = 0; ia < da; ++ia)
      for (int i1 = 0; i1 + 1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
          acc += std::sqrt(i1 + 1.0) * rho(index(ia, i1 + 1, i2), index(ia, i1, i2));
    return acc;
  }

  // Populations of the topmost retained Fock layer of each mode.
  double top_layer_population(int mode) const {
    double acc = 0.0;
    const int da = atom_dim();
    for (int ia = 0; ia < da; ++ia)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
          if ((mode == 1 && i1 == n1 - 1) || (mode == 2 && i2 == n2 - 1))
            acc += rho(index(ia, i1, i2), index(ia, i1, i2)).real();
        }
    return acc;
  }

  double mode2_vacuum_deviation() const {
    double acc = 0.0;
    const int da = atom_dim();
    for (int ia = 0; ia < da; ++ia)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 1; i2 < n2; ++i2)
          acc += rho(index(ia, i1, i2), index(ia, i1, i2)).real();
    return acc;
  }
};

struct FockGenerators {
  PhysicalParams params;
  int da = 0, n1 = 0, n2 = 0, dim = 0;
  Eigen::VectorXd h_diag;        // Hamiltonian g~ n a^dag a, diagonal
  Eigen::VectorXd n1_diag, n2_diag;
  SparseCd a1, a1d, c2, c2d;
  SparseCd comm_op;              // -i/2 (eps c^dag^2 + eps^* c^2) + drive generators
  SparseCd ac, ca;               // a^dag c and c^dag a
  SparseCd m_op, m_opd, m_sq, m_sqd;  // measurement operator, adjoint, M^2, M^dag^2
  SparseCd j1, j1d;    // cascaded output jump sqrt(k1) a - i sqrt(k2) c
  SparseCd g_nojump;   // no-jump generator (see integrate)
  double kap_a = 0.0, kap_c = 0.0, root12 = 0.0;
};

// Assemble every term of the conditional master equation as sparse operators
// over the truncated joint basis.
inline FockGenerators build_generators(const PhysicalParams& p, int n1, int n2) {
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("build_generators: cutoffs must be >= 2");
  FockGenerators g;
  g.params = p;
  SpinBasis basis(p.big_j);
  g.da = basis.dim();
  g.n1 = n1;
  g.n2 = n2;
  g.dim = g.da * n1 * n2;
  g.kap_a = p.kappa();
  g.kap_c = p.kappa_c();
  g.root12 = std::sqrt(p.kappa1 * p.kappa2);

  auto index = [&](int ia, int i1, int i2) { return (ia * n1 + i1) * n2 + i2; };

  g.h_diag.resize(g.dim);
  g.n1_diag.resize(g.dim);
  g.n2_diag.resize(g.dim);
  const double gt = p.g_tilde();
  for (int ia = 0; ia < g.da; ++ia)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        const int ix = index(ia, i1, i2);
        g.h_diag(ix) = gt * basis.n_of(ia) * i1;
        g.n1_diag(ix) = i1;
        g.n2_diag(ix) = i2;
      }

  using T = Eigen::Triplet<cd>;
  std::vector<T> ta, tc;
  for (int ia = 0; ia < g.da; ++ia)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        if (i1 >= 1) ta.emplace_back(index(ia, i1 - 1, i2), index(ia, i1, i2),
                                     cd(std::sqrt(double(i1)), 0.0));
        if (i2 >= 1) tc.emplace_back(index(ia, i1, i2 - 1), index(ia, i1, i2),
                                     cd(std::sqrt(double(i2)), 0.0));
      }
  g.a1.resize(g.dim, g.dim);
  g.a1.setFromTriplets(ta.begin(), ta.end());
  g.c2.resize(g.dim, g.dim);
  g.c2.setFromTriplets(tc.begin(), tc.end());
  g.a1d = SparseCd(g.a1.adjoint());
  g.c2d = SparseCd(g.c2.adjoint());

  const cd i_unit(0.0, 1.0);
  const SparseCd c2sq = SparseCd(g.c2 * g.c2);
  const SparseCd c2dsq = SparseCd(g.c2d * g.c2d);
  const double rk1 = std::sqrt(p.kappa1), rk2 = std::sqrt(p.kappa2);
  // commutator generator: squeezing plus the two drive terms
  g.comm_op = SparseCd(-0.5 * i_unit * (p.epsilon * c2dsq + std::conj(p.epsilon) * c2sq) +
                       i_unit * rk1 * (p.beta * g.a1d + std::conj(p.beta) * g.a1) +
                       rk2 * (-p.beta * g.c2d + std::conj(p.beta) * g.c2));
  g.ac = SparseCd(g.a1d * g.c2);
  g.ca = SparseCd(g.c2d * g.a1);
  double cphi = std::cos(p.phi), sphi = std::sin(p.phi);
  if (std::abs(sphi) < 1e-9) {
    sphi = 0.0;
    cphi = cphi > 0.0 ? 1.0 : -1.0;
  } else if (std::abs(cphi) < 1e-9) {
    cphi = 0.0;
    sphi = sphi > 0.0 ? 1.0 : -1.0;
  }
  const cd eiphi(cphi, -sphi);
  g.m_op = SparseCd(eiphi * (-std::sqrt(p.eta * p.kappa1) * g.a1 +
                             i_unit * std::sqrt(p.eta * p.kappa2) * g.c2));
  g.m_opd = SparseCd(g.m_op.adjoint());
  g.m_sq = SparseCd(g.m_op * g.m_op);
  g.m_sqd = SparseCd(g.m_sq.adjoint());
  g.j1 = SparseCd(rk1 * g.a1 - i_unit * rk2 * g.c2);
  g.j1d = SparseCd(g.j1.adjoint());

  // no-jump generator: rho' = G rho + rho G^dag plus the positive feed terms
  // (1-eta) J1 rho J1^dag + kappa_loss a rho a^dag + ... recovers the full
  // deterministic generator together with the measurement sandwich.
  SparseCd diag(g.dim, g.dim);
  {
    std::vector<T> td;
    td.reserve(static_cast<std::size_t>(g.dim));
    for (int ix = 0; ix < g.dim; ++ix)
      td.emplace_back(ix, ix,
                      cd(-0.5 * (g.kap_a * g.n1_diag(ix) + g.kap_c * g.n2_diag(ix)),
                         -g.h_diag(ix)));
    diag.setFromTriplets(td.begin(), td.end());
  }
  g.g_nojump = SparseCd(diag + g.comm_op + i_unit * g.root12 * g.ac - 0.5 * g.m_sq);
  return g;
}

// Deterministic part of d rho / dt.
inline void apply_deterministic(const FockGenerators& g, const Eigen::MatrixXcd& x,
                                Eigen::MatrixXcd& out) {
  const cd i_unit(0.0, 1.0);
  const int d = g.dim;
  out.resize(d, d);
  // elementwise: Hamiltonian commutator and dissipator anticommutators
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const double hd = g.h_diag(i) - g.h_diag(j);
      const double damp = 0.5 * g.kap_a * (g.n1_diag(i) + g.n1_diag(j)) +
                          0.5 * g.kap_c * (g.n2_diag(i) + g.n2_diag(j));
      out(i, j) = (cd(0.0, -hd) - damp) * x(i, j);
    }
  // commutator block (squeezing + drives)
  out.noalias() += g.comm_op * x;
  out.noalias() -= x * g.comm_op;
  // dissipator feed terms and cascade
  Eigen::MatrixXcd t1 = g.a1 * x;   // a rho
  Eigen::MatrixXcd t2 = g.c2 * x;   // c rho
  out.noalias() += g.kap_a * (t1 * g.a1d);
  out.noalias() += g.kap_c * (t2 * g.c2d);
  if (g.root12 != 0.0) {
    out.noalias() += (i_unit * g.root12) * (g.ac * x);
    out.noalias() -= (i_unit * g.root12) * (x * g.ca);
    out.noalias() += (i_unit * g.root12) * (t1 * g.c2d);
    out.noalias() -= (i_unit * g.root12) * (t2 * g.a1d);
  }
}

inline double measured_mean(const FockGenerators& g, const Eigen::MatrixXcd& x) {
  return 2.0 * (g.m_op * x).trace().real();
}

// Measurement (dW) part: M rho + rho M^dag - Tr(M rho + rho M^dag) rho.
inline void apply_measurement(const FockGenerators& g, const Eigen::MatrixXcd& x,
                              Eigen::MatrixXcd& out, double* mean_out = nullptr) {
  out.noalias() = g.m_op * x;
  out.noalias() += x * g.m_opd;
  const double mu = out.trace().real();
  out.noalias() -= mu * x;
  if (mean_out) *mean_out = mu;
}

struct FockMonitor {
  double max_trace_drift = 0.0;
  double max_herm_correction = 0.0;
  double max_top_layer = 0.0;
  double min_eigenvalue = 0.0;
};

namespace detail {
// Positive feed part of the deterministic generator:
// (1-eta) J1 x J1^dag + kappa_loss1 a x a^dag + kappa_loss2 c x c^dag.
// x must be Hermitian; only dense-times-sparse products are used (the fast
// Eigen path), left factors obtained by adjoint: B x B^dag = (x B^dag)^dag B^dag.
inline void apply_feed(const FockGenerators& g, const Eigen::MatrixXcd& x,
                       Eigen::MatrixXcd& out, Eigen::MatrixXcd& t1,
                       Eigen::MatrixXcd& t2) {
  out.setZero(x.rows(), x.cols());
  const PhysicalParams& p = g.params;
  if (p.eta < 1.0) {
    t1.noalias() = x * g.j1d;
    t2 = t1.adjoint();
    out.noalias() += (1.0 - p.eta) * (t2 * g.j1d);
  }
  if (p.kappa_loss1 > 0.0) {
    t1.noalias() = x * g.a1d;
    t2 = t1.adjoint();
    out.noalias() += p.kappa_loss1 * (t2 * g.a1d);
  }
  if (p.kappa_loss2 > 0.0) {
    t1.noalias() = x * g.c2d;
    t2 = t1.adjoint();
    out.noalias() += p.kappa_loss2 * (t2 * g.c2d);
  }
}
}  // namespace detail

// Advance the truncated state with second-order deterministic accuracy and
// Milstein-order noise. Every factor of the per-step map is completely
// positive: the measurement enters as the sandwich
//   rho -> K rho K^dag,  K = 1 + M dy + M^2 dy^2 / 2,
// (the Milstein expansion of the conditional master equation in its linear
// filtering form), the no-jump flow as E rho E^dag with the second-order
// exponential E of g_nojump, and the remaining feed terms by a Strang split.
// The state is renormalized each step; the Wiener increments are supplied by
// the caller and the produced record holds dy_k = mu dt + dW_k.
inline MeasurementRecord integrate(TruncatedState& state, const FockGenerators& g,
                                   const std::vector<double>& dw, double dt,
                                   long steps, FockMonitor* monitor = nullptr) {
  if (steps > static_cast<long>(dw.size()))
    throw std::invalid_argument("integrate: not enough Wiener increments");
  const double rate = std::max({g.kap_a, g.kap_c, std::abs(g.params.epsilon),
                                g.params.big_j * g.params.g_tilde()});
  if (dt * rate > 0.005 * (1.0 + 1e-9))
    throw std::invalid_argument("integrate: dt * max rate exceeds 0.005");

  MeasurementRecord rec;
  rec.dt = dt;
  rec.dy.reserve(static_cast<std::size_t>(steps));
  rec.dw.assign(dw.begin(), dw.begin() + steps);

  SparseCd ident(g.dim, g.dim);
  ident.setIdentity();
  const SparseCd e_op =
      SparseCd(ident + dt * g.g_nojump + (0.5 * dt * dt) * SparseCd(g.g_nojump * g.g_nojump));
  const SparseCd e_opd = SparseCd(e_op.adjoint());

  Eigen::MatrixXcd u1, u2, x, kl, f1, f2, ta, tb;
  FockMonitor mon;
  mon.min_eigenvalue = 1.0;
  auto feed_half = [&](Eigen::MatrixXcd& y) {
    detail::apply_feed(g, y, f1, ta, tb);
    detail::apply_feed(g, f1, f2, ta, tb);
    y += (0.5 * dt) * f1 + (0.125 * dt * dt) * f2;
  };
  for (long k = 0; k < steps; ++k) {
    const double dwk = dw[static_cast<std::size_t>(k)];
    // rho M^dag and rho M^dag^2; their adjoints give M rho and M^2 rho
    u1.noalias() = state.rho * g.m_opd;
    u2.noalias() = u1 * g.m_opd;
    const double mu = 2.0 * u1.trace().real();
    const double dy = mu * dt + dwk;

    // measurement sandwich K rho K^dag with K = 1 + M dy + M^2 dy^2/2
    kl = state.rho;
    kl.noalias() += dy * u1.adjoint();
    kl.noalias() += (0.5 * dy * dy) * u2.adjoint();
    x = kl;
    x.noalias() += dy * (kl * g.m_opd);
    x.noalias() += (0.5 * dy * dy) * (kl * g.m_sqd);

    // Strang split of the deterministic flow
    feed_half(x);
    ta.noalias() = x * e_opd;
    tb = ta.adjoint();       // = e_op x for Hermitian x
    x.noalias() = tb * e_opd;
    feed_half(x);
    state.rho = x;

    // enforce hermiticity and unit trace, track the size of the corrections;
    // the pre-normalization trace carries the record likelihood here, so the
    // integrity check on the generator is the Lindblad trace identity below
    const Eigen::MatrixXcd herm = 0.5 * (state.rho + state.rho.adjoint().eval());
    mon.max_herm_correction =
        std::max(mon.max_herm_correction, (state.rho - herm).cwiseAbs().maxCoeff());
    state.rho = herm;
    const double tr = state.rho.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr))
      throw std::runtime_error("integrate: state norm lost at step " + std::to_string(k));
    state.rho /= tr;

    if (k % 100 == 0 || k == steps - 1) {
      apply_deterministic(g, state.rho, ta);
      const double drift = std::abs(ta.trace()) * dt;
      mon.max_trace_drift = std::max(mon.max_trace_drift, drift);
      if (drift > 1e-6)
        throw std::runtime_error("integrate: generator trace defect " +
                                 std::to_string(drift) + " at step " + std::to_string(k));
      const double top = std::max(state.top_layer_population(1),
                                  state.top_layer_population(2));
      mon.max_top_layer = std::max(mon.max_top_layer, top);
      if (top > 1e-6)
        throw std::runtime_error("integrate: Fock cutoff saturated, top-layer population " +
                                 std::to_string(top) + " at step " + std::to_string(k));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.rho, Eigen::EigenvaluesOnly);
      mon.min_eigenvalue = std::min(mon.min_eigenvalue, es.eigenvalues().minCoeff());
      if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::runtime_error("integrate: negative eigenvalue " +
                                 std::to_string(es.eigenvalues().minCoeff()));
    }

    rec.dy.push_back(dy);
  }
  if (monitor) *monitor = mon;
  return rec;
}

}  // namespace catprobe

#endif
