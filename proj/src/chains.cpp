#include "qprop/chains.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace qprop {

Eigen::MatrixXd build_Z(const ChainSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("chain needs n >= 1 sites");
  if (!(spec.mass > 0.0)) throw std::invalid_argument("chain mass must be positive");
  if (spec.omega0 < 0.0) throw std::invalid_argument("chain omega0 must be non-negative");
  const int n = spec.n;
  const double k = spec.mass * spec.omega0 * spec.omega0;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
  if (spec.boundary == Boundary::Periodic) {
    if (n == 1) {
      // The single spring couples the site to itself and cancels.
      std::cerr << "qprop: periodic chain with n=1 has no coupling; Z = [0]\n";
      return Z;
    }
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      Z(i, i) += k;
      Z(j, j) += k;
      Z(i, j) -= k;
      Z(j, i) -= k;
    }
  } else {
    // Wall springs (0,1) and (n, n+1) plus the n-1 interior springs.
    for (int i = 0; i < n; ++i) Z(i, i) = 2.0 * k;
    for (int i = 0; i + 1 < n; ++i) {
      Z(i, i + 1) = -k;
      Z(i + 1, i) = -k;
    }
  }
  return Z;
}

namespace {

// Re-spans each degenerate eigenvalue group by projecting coordinate axes
// onto the eigenspace and orthonormalizing in index order, then fixes the
// overall sign of every column. Output is independent of the backend's
// arbitrary basis choice inside degenerate subspaces.
void canonicalize(Eigen::VectorXd& z, Eigen::MatrixXd& V) {
  const int n = static_cast<int>(z.size());
  const double scale = std::max(z.cwiseAbs().maxCoeff(), 1.0);
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && std::abs(z[hi] - z[lo]) <= 1e-9 * scale) ++hi;
    const int dim = hi - lo;
    if (dim > 1) {
      const Eigen::MatrixXd P =
          V.middleCols(lo, dim) * V.middleCols(lo, dim).transpose();
      Eigen::MatrixXd basis(n, dim);
      int found = 0;
      for (int j = 0; j < n && found < dim; ++j) {
        Eigen::VectorXd w = P.col(j);
        for (int k = 0; k < found; ++k) w -= basis.col(k).dot(w) * basis.col(k);
        const double norm = w.norm();
        if (norm > 1e-6) basis.col(found++) = w / norm;
      }
      if (found == dim) V.middleCols(lo, dim) = basis;
    }
    lo = hi;
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(V(j, k)) > 1e-12) {
        if (V(j, k) < 0.0) V.col(k) = -V.col(k);
        break;
      }
    }
  }
}

}  // namespace

ModeDecomposition decompose(const Eigen::MatrixXd& Z, double mass) {
  if (Z.rows() != Z.cols()) throw std::invalid_argument("Z must be square");
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  const double scale = std::max(Z.cwiseAbs().maxCoeff(), 1e-300);
  if ((Z - Z.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("Z must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  ModeDecomposition d;
  d.z = es.eigenvalues();
  d.V = es.eigenvectors();
  canonicalize(d.z, d.V);
  d.mass = mass;
  d.omega.resize(d.z.size());
  for (int k = 0; k < d.z.size(); ++k) d.omega[k] = std::sqrt(std::max(d.z[k], 0.0) / mass);
  return d;
}

Eigen::VectorXd transform_coords(const ModeDecomposition& decomp, const Eigen::VectorXd& q) {
  if (q.size() != decomp.z.size()) throw std::invalid_argument("coordinate dimension mismatch");
  return decomp.V.transpose() * q;
}

Eigen::VectorXd inverse_transform_coords(const ModeDecomposition& decomp,
                                         const Eigen::VectorXd& q_tilde) {
  if (q_tilde.size() != decomp.z.size())
    throw std::invalid_argument("coordinate dimension mismatch");
  return decomp.V * q_tilde;
}

QuadraticHamiltonian chain_hamiltonian(const ChainSpec& spec, double hbar) {
  QuadraticHamiltonian H;
  H.n = spec.n;
  H.hbar = hbar;
  H.Z = MatrixTimeDep::constant(build_Z(spec));
  H.L = MatrixTimeDep::constant(Eigen::MatrixXd::Zero(spec.n, spec.n));
  H.K = MatrixTimeDep::constant((1.0 / spec.mass) *
                                Eigen::MatrixXd::Identity(spec.n, spec.n));
  H.mu = spec.force ? *spec.force : VectorTimeDep::constant(Eigen::VectorXd::Zero(spec.n));
  H.nu = VectorTimeDep::constant(Eigen::VectorXd::Zero(spec.n));
  return H;
}

}  // namespace qprop
