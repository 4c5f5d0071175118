#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qprop/hamiltonian.hpp"

namespace qprop {

enum class Boundary { Periodic, Dirichlet };

/// Uniform chain of harmonic oscillators with nearest-neighbour springs.
struct ChainSpec {
  int n = 1;
  double mass = 1.0;
  double omega0 = 1.0;
  Boundary boundary = Boundary::Dirichlet;
  std::optional<VectorTimeDep> force;  // per-site drive f(t), coupled as -f(t).q
};

/// Coupling matrix Z: diagonal 2 m w0^2, off-diagonal -m w0^2. Periodic
/// wraps site n to site 1; Dirichlet pins virtual walls q_0 = q_{n+1} = 0.
Eigen::MatrixXd build_Z(const ChainSpec& spec);

/// Normal modes of a coupling matrix Z with uniform mass m.
struct ModeDecomposition {
  Eigen::VectorXd z;      // eigenvalues, ascending
  Eigen::MatrixXd V;      // orthonormal eigenvectors as columns
  Eigen::VectorXd omega;  // sqrt(max(z, 0) / m)
  double mass = 1.0;

  int size() const { return static_cast<int>(z.size()); }
};

/// Symmetric eigendecomposition with a deterministic basis: ascending
/// eigenvalues, degenerate subspaces re-spanned by Gram-Schmidt against the
/// coordinate axes in index order, first nonzero component of each
/// eigenvector positive.
ModeDecomposition decompose(const Eigen::MatrixXd& Z, double mass);

/// Normal coordinates q~ = V^T q.
Eigen::VectorXd transform_coords(const ModeDecomposition& decomp, const Eigen::VectorXd& q);

/// Inverse of transform_coords, q = V q~.
Eigen::VectorXd inverse_transform_coords(const ModeDecomposition& decomp,
                                         const Eigen::VectorXd& q_tilde);

/// The chain as a quadratic Hamiltonian: constant Z, L = 0, K = (1/m) I,
/// mu = force (if any), nu = 0.
QuadraticHamiltonian chain_hamiltonian(const ChainSpec& spec, double hbar = 1.0);

}  // namespace qprop
