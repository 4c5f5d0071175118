#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qprop/time_dep.hpp"

namespace qprop {

/// General time-dependent quadratic Hamiltonian
///   H = 1/2 q.Z(t).q + 1/2 q.L(t)^T.p + 1/2 p.L(t).q + 1/2 p.K(t).p
///       - mu(t).q - nu(t).p
/// in n degrees of freedom. Z(t) and K(t) must be symmetric.
struct QuadraticHamiltonian {
  int n = 1;
  double hbar = 1.0;
  MatrixTimeDep Z;
  MatrixTimeDep L;
  MatrixTimeDep K;
  VectorTimeDep mu;
  VectorTimeDep nu;

  bool time_independent() const {
    return Z.is_constant() && L.is_constant() && K.is_constant() && mu.is_constant() &&
           nu.is_constant();
  }
  bool source_free() const { return mu.is_zero() && nu.is_zero(); }

  /// n-dimensional oscillator: Z = m w^2 I, L = 0, K = (1/m) I, optional force mu(t).
  static QuadraticHamiltonian isotropic_oscillator(int n, double mass, double omega,
                                                   double hbar = 1.0);
};

struct ValidationReport {
  bool passed = false;
  double z_defect = 0.0;  // max over sampled times of |Z - Z^T|_max / |Z|_max
  double k_defect = 0.0;
  std::vector<std::string> issues;
};

/// Relative symmetry tolerance on Z(t), K(t); double-precision assembly noise only.
inline constexpr double kSymmetryTol = 1e-12;

/// Checks dimensions and the symmetry of Z(t), K(t) over the sampled times.
ValidationReport validate(const QuadraticHamiltonian& H, const std::vector<double>& times);

/// The 2n x 2n coefficient matrix [[Z, L^T], [L, K]] at time t.
Eigen::MatrixXd w_matrix(const QuadraticHamiltonian& H, double t);

/// The canonical symplectic form s = [[0, I], [-I, 0]].
Eigen::MatrixXd symplectic_form(int n);

/// Generator of the Heisenberg flow, s.w(t) = [[L, K], [-Z, -L^T]].
Eigen::MatrixXd symplectic_generator(const QuadraticHamiltonian& H, double t);

}  // namespace qprop
