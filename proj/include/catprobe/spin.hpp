#ifndef CATPROBE_SPIN_HPP
#define CATPROBE_SPIN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "catprobe/units.hpp"

namespace catprobe {

// log of binomial(n, k) via lgamma; safe far beyond the overflow point of
// factorials.
inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Basis bookkeeping for the J_z eigenbasis |n>, n = -J..J (half-integer steps).
struct SpinBasis {
  double big_j = 0.0;
  explicit SpinBasis(double j) : big_j(j) {
    const double twoj = 2.0 * j;
    if (!(j >= 0.0) || std::abs(twoj - std::lround(twoj)) > 1e-9)
      throw std::invalid_argument("SpinBasis: J must be a nonnegative multiple of 1/2");
  }
  int dim() const { return static_cast<int>(std::lround(2.0 * big_j)) + 1; }
  double n_of(int i) const { return static_cast<double>(i) - big_j; }
  int index_of(double n) const { return static_cast<int>(std::lround(n + big_j)); }
};

// Expansion coefficients C_nm of the initial atomic state, Hermitian with
// unit diagonal sum.
struct AtomicCoefficients {
  double big_j = 0.0;
  Eigen::MatrixXcd c;

  int dim() const { return static_cast<int>(c.rows()); }

  double trace_diag() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += c(i, i).real();
    return s;
  }

  // Coherent spin state along x. All entries real positive, symmetric under
  // n -> -n and m -> -m; computed in log space so large J stays finite.
  static AtomicCoefficients css_x(double big_j) {
    SpinBasis basis(big_j);
    const int d = basis.dim();
    const double twoj = 2.0 * big_j;
    AtomicCoefficients out;
    out.big_j = big_j;
    out.c.resize(d, d);
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        const double n = basis.n_of(i), m = basis.n_of(k);
        const double lw = -twoj * std::log(2.0) +
                          0.5 * (log_binomial(twoj, big_j + n) +
                                 log_binomial(twoj, big_j + m));
        out.c(i, k) = cd(std::exp(lw), 0.0);
      }
    }
    return out;
  }

  // Large-N Gaussian approximation of the coherent-spin-state coefficients.
  static AtomicCoefficients css_x_gaussian(double big_j) {
    SpinBasis basis(big_j);
    const int d = basis.dim();
    const double n_at = 2.0 * big_j;
    AtomicCoefficients out;
    out.big_j = big_j;
    out.c.resize(d, d);
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        const double n = basis.n_of(i), m = basis.n_of(k);
        out.c(i, k) = cd(std::sqrt(2.0 / (pi * n_at)) *
                             std::exp(-(n * n + m * m) / n_at),
                         0.0);
      }
    }
    return out;
  }

  // Equal pure superposition of |n0> and |-n0>.
  static AtomicCoefficients two_state(double big_j, double n0) {
    SpinBasis basis(big_j);
    const int d = basis.dim();
    AtomicCoefficients out;
    out.big_j = big_j;
    out.c = Eigen::MatrixXcd::Zero(d, d);
    const int ip = basis.index_of(n0), im = basis.index_of(-n0);
    out.c(ip, ip) = out.c(im, im) = 0.5;
    out.c(ip, im) = out.c(im, ip) = 0.5;
    return out;
  }
};

// Reduced atomic state in the J_z basis.
struct AtomicDensityMatrix {
  double big_j = 0.0;
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }
  double n_of(int i) const { return static_cast<double>(i) - big_j; }

  double trace() const { return rho.trace().real(); }

  double purity() const { return (rho * rho).trace().real(); }

  Eigen::VectorXd diagonal() const { return rho.diagonal().real(); }

  double hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  }
};

}  // namespace catprobe

#endif
