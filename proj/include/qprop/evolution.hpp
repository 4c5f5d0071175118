#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qprop/hamiltonian.hpp"

namespace qprop {

/// Blocks of the fundamental matrix theta(t) = [[A, B], [C, D]] mapping
/// initial (q, p) operators to time-t operators. theta(0) = identity.
struct SymplecticBlocks {
  double t = 0.0;
  Eigen::MatrixXd A, B, C, D;

  int dim() const { return static_cast<int>(A.rows()); }
  Eigen::MatrixXd matrix() const;

  static SymplecticBlocks identity(int n);
  static SymplecticBlocks from_matrix(double t, const Eigen::MatrixXd& theta);
};

/// |A D^T - B C^T - I|_max, the canonical-commutator residual.
double symplectic_defect(const SymplecticBlocks& blocks);

/// Default acceptance bound on the commutator residual of produced blocks.
inline constexpr double kSympTol = 1e-9;

/// theta^{-1}. Uses the exact symplectic identity -s.theta^T.s while the
/// commutator residual is below `defect_tol`, dense LU otherwise.
Eigen::MatrixXd symplectic_inverse(const SymplecticBlocks& blocks, double defect_tol = 1e-6);

/// Fundamental matrix at time t. Closed form (eigendecomposition of Z) for
/// constant coefficients with L = 0 and scalar K; dense matrix exponential
/// for general constant coefficients; fixed-step RK4 otherwise. `step`
/// bounds the RK4 step size.
SymplecticBlocks fundamental_matrix(const QuadraticHamiltonian& H, double t, double step);

/// Matrix Green function G(t, t') = theta(t) . theta(t')^{-1} for t >= t'.
Eigen::MatrixXd green_function(const SymplecticBlocks& theta_t, const SymplecticBlocks& theta_tp);

/// Classical response to the sources mu, nu. zeta = xi - D.B^{-1}.eta is
/// absent when B_t is singular (caustic), unless the response vanishes.
struct SourceResponse {
  double t = 0.0;
  Eigen::VectorXd eta;
  Eigen::VectorXd xi;
  std::optional<Eigen::VectorXd> zeta;

  const Eigen::VectorXd& zeta_or_throw() const;
};

/// Relative determinant threshold below which B_t counts as singular.
inline constexpr double kCausticDetTol = 1e-12;

/// B_t is at a caustic when |det B| <= tol * s^n with s the characteristic
/// magnitude of B. The instantaneous |B|_max alone is degenerate exactly at
/// a caustic (and identically so for n = 1), so callers that know the
/// Hamiltonian pass scale ~ |K(t)| * t, the natural size of B_t.
bool is_caustic(const Eigen::MatrixXd& B, double scale = 0.0);

/// eta, xi at time t via composite Simpson quadrature of the Green-function
/// integral on a uniform grid of spacing <= step.
SourceResponse source_response(const QuadraticHamiltonian& H, double t, double step);

/// Fundamental matrix and source response sampled on a uniform grid over
/// [0, t]: an odd number of nodes with spacing <= step, suitable as Simpson
/// nodes for the kernel phase integral. blocks[j] and responses[j] share
/// node times; the last entry is the state at t.
struct PropagationPath {
  std::vector<SymplecticBlocks> blocks;
  std::vector<SourceResponse> responses;
  double spacing = 0.0;
};

PropagationPath propagate_path(const QuadraticHamiltonian& H, double t, double step);

}  // namespace qprop
