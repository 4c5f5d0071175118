#include "qprop/evolution.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "qprop/errors.hpp"
#include "qprop/quadrature.hpp"

namespace qprop {

Eigen::MatrixXd SymplecticBlocks::matrix() const {
  const int n = dim();
  Eigen::MatrixXd theta(2 * n, 2 * n);
  theta.topLeftCorner(n, n) = A;
  theta.topRightCorner(n, n) = B;
  theta.bottomLeftCorner(n, n) = C;
  theta.bottomRightCorner(n, n) = D;
  return theta;
}

SymplecticBlocks SymplecticBlocks::identity(int n) {
  SymplecticBlocks b;
  b.t = 0.0;
  b.A = Eigen::MatrixXd::Identity(n, n);
  b.B = Eigen::MatrixXd::Zero(n, n);
  b.C = Eigen::MatrixXd::Zero(n, n);
  b.D = Eigen::MatrixXd::Identity(n, n);
  return b;
}

SymplecticBlocks SymplecticBlocks::from_matrix(double t, const Eigen::MatrixXd& theta) {
  if (theta.rows() != theta.cols() || theta.rows() % 2 != 0)
    throw std::invalid_argument("fundamental matrix must be square with even dimension");
  const int n = static_cast<int>(theta.rows()) / 2;
  SymplecticBlocks b;
  b.t = t;
  b.A = theta.topLeftCorner(n, n);
  b.B = theta.topRightCorner(n, n);
  b.C = theta.bottomLeftCorner(n, n);
  b.D = theta.bottomRightCorner(n, n);
  return b;
}

double symplectic_defect(const SymplecticBlocks& blocks) {
  const int n = blocks.dim();
  const Eigen::MatrixXd r =
      blocks.A * blocks.D.transpose() - blocks.B * blocks.C.transpose() -
      Eigen::MatrixXd::Identity(n, n);
  return r.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd symplectic_inverse(const SymplecticBlocks& blocks, double defect_tol) {
  const int n = blocks.dim();
  if (symplectic_defect(blocks) <= defect_tol) {
    // -s.theta^T.s, written out blockwise: [[D^T, -B^T], [-C^T, A^T]].
    Eigen::MatrixXd inv(2 * n, 2 * n);
    inv.topLeftCorner(n, n) = blocks.D.transpose();
    inv.topRightCorner(n, n) = -blocks.B.transpose();
    inv.bottomLeftCorner(n, n) = -blocks.C.transpose();
    inv.bottomRightCorner(n, n) = blocks.A.transpose();
    return inv;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(blocks.matrix());
  if (!lu.isInvertible())
    throw std::runtime_error("fundamental matrix is singular; integration failed");
  return lu.inverse();
}

namespace {

// A, B, C entries of theta(t) for a single normal mode of stiffness z and
// mass m. Handles z < 0 (hyperbolic) and the z -> 0 limit by series.
void mode_block_entries(double z, double m, double t, double& a, double& b, double& c) {
  const double u = z / m;
  const double x = std::sqrt(std::abs(u)) * t;
  if (x < 1e-8) {
    a = 1.0 - 0.5 * u * t * t;
    b = (t - u * t * t * t / 6.0) / m;
    c = -z * t + z * z * t * t * t / (6.0 * m);
  } else if (u > 0.0) {
    const double w = std::sqrt(u);
    a = std::cos(w * t);
    b = std::sin(w * t) / (m * w);
    c = -m * w * std::sin(w * t);
  } else {
    const double w = std::sqrt(-u);
    a = std::cosh(w * t);
    b = std::sinh(w * t) / (m * w);
    c = m * w * std::sinh(w * t);
  }
}

SymplecticBlocks blocks_closed_form(const Eigen::MatrixXd& Z, double mass, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of Z failed");
  const int n = static_cast<int>(Z.rows());
  Eigen::VectorXd a(n), b(n), c(n);
  for (int k = 0; k < n; ++k) mode_block_entries(es.eigenvalues()[k], mass, t, a[k], b[k], c[k]);
  const Eigen::MatrixXd& V = es.eigenvectors();
  SymplecticBlocks out;
  out.t = t;
  out.A = V * a.asDiagonal() * V.transpose();
  out.B = V * b.asDiagonal() * V.transpose();
  out.C = V * c.asDiagonal() * V.transpose();
  out.D = out.A;
  return out;
}

// Uniform mass 1/kappa when K = kappa * I within round-off.
bool scalar_kinetic(const Eigen::MatrixXd& K, double& kappa) {
  const int n = static_cast<int>(K.rows());
  kappa = K.trace() / n;
  if (!(kappa > 0.0)) return false;
  const double defect =
      (K - kappa * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  return defect <= 1e-12 * std::abs(kappa);
}

Eigen::MatrixXd rk4_sweep(const QuadraticHamiltonian& H, double t, std::size_t steps) {
  const int n = H.n;
  const double h = t / static_cast<double>(steps);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t0 = static_cast<double>(i) * h;
    const Eigen::MatrixXd g1 = symplectic_generator(H, t0);
    const Eigen::MatrixXd g2 = symplectic_generator(H, t0 + 0.5 * h);
    const Eigen::MatrixXd g3 = symplectic_generator(H, t0 + h);
    const Eigen::MatrixXd k1 = g1 * theta;
    const Eigen::MatrixXd k2 = g2 * (theta + (0.5 * h) * k1);
    const Eigen::MatrixXd k3 = g2 * (theta + (0.5 * h) * k2);
    const Eigen::MatrixXd k4 = g3 * (theta + h * k3);
    theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return theta;
}

}  // namespace

SymplecticBlocks fundamental_matrix(const QuadraticHamiltonian& H, double t, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  if (t == 0.0) return SymplecticBlocks::identity(H.n);

  const bool constant_coeffs =
      H.Z.is_constant() && H.L.is_constant() && H.K.is_constant();
  if (constant_coeffs) {
    double kappa = 0.0;
    if (H.L.is_zero() && scalar_kinetic(H.K(0.0), kappa))
      return blocks_closed_form(H.Z(0.0), 1.0 / kappa, t);
    const Eigen::MatrixXd gen = symplectic_generator(H, 0.0);
    return SymplecticBlocks::from_matrix(t, (t * gen).exp());
  }

  const std::size_t steps = interval_count(t, step, 1);
  return SymplecticBlocks::from_matrix(t, rk4_sweep(H, t, steps));
}

Eigen::MatrixXd green_function(const SymplecticBlocks& theta_t,
                               const SymplecticBlocks& theta_tp) {
  if (theta_t.t < theta_tp.t)
    throw std::invalid_argument("green_function requires t >= t'");
  return theta_t.matrix() * symplectic_inverse(theta_tp);
}

const Eigen::VectorXd& SourceResponse::zeta_or_throw() const {
  if (!zeta)
    throw CausticError("zeta unavailable: B(t) singular at t=" + std::to_string(t));
  return *zeta;
}

bool is_caustic(const Eigen::MatrixXd& B, double scale) {
  const int n = static_cast<int>(B.rows());
  const double s = std::max({B.cwiseAbs().maxCoeff(), scale, 1e-300});
  const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(B).determinant();
  return std::abs(det) <= kCausticDetTol * std::pow(s, n);
}

namespace {

void attach_zeta(SourceResponse& resp, const SymplecticBlocks& blocks, double b_scale) {
  if (resp.eta.cwiseAbs().maxCoeff() == 0.0 && resp.xi.cwiseAbs().maxCoeff() == 0.0) {
    resp.zeta = Eigen::VectorXd::Zero(resp.eta.size());
    return;
  }
  if (is_caustic(blocks.B, b_scale)) return;
  const Eigen::VectorXd binv_eta = blocks.B.partialPivLu().solve(resp.eta);
  resp.zeta = resp.xi - blocks.D * binv_eta;
}

}  // namespace

PropagationPath propagate_path(const QuadraticHamiltonian& H, double t, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  const int n = H.n;

  PropagationPath path;
  if (t == 0.0) {
    SourceResponse r0;
    r0.t = 0.0;
    r0.eta = Eigen::VectorXd::Zero(n);
    r0.xi = Eigen::VectorXd::Zero(n);
    r0.zeta = Eigen::VectorXd::Zero(n);
    path.blocks = {SymplecticBlocks::identity(n)};
    path.responses = {r0};
    path.spacing = 0.0;
    return path;
  }

  // Fine grid at half the requested spacing; response nodes sit on the even
  // fine nodes so that both the inner (response) and outer (phase) Simpson
  // rules have an even interval count.
  const std::size_t nfine = interval_count(t, 0.5 * step, 4);
  const double h = t / static_cast<double>(nfine);

  // Fundamental matrix at every fine node.
  std::vector<Eigen::MatrixXd> theta(nfine + 1);
  theta[0] = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const bool constant_coeffs =
      H.Z.is_constant() && H.L.is_constant() && H.K.is_constant();
  double kappa = 0.0;
  if (constant_coeffs && H.L.is_zero() && scalar_kinetic(H.K(0.0), kappa)) {
    const double mass = 1.0 / kappa;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.Z(0.0));
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of Z failed");
    for (std::size_t j = 1; j <= nfine; ++j) {
      const double tj = static_cast<double>(j) * h;
      Eigen::VectorXd a(n), b(n), c(n);
      for (int k = 0; k < n; ++k)
        mode_block_entries(es.eigenvalues()[k], mass, tj, a[k], b[k], c[k]);
      const Eigen::MatrixXd& V = es.eigenvectors();
      Eigen::MatrixXd m(2 * n, 2 * n);
      m.topLeftCorner(n, n) = V * a.asDiagonal() * V.transpose();
      m.topRightCorner(n, n) = V * b.asDiagonal() * V.transpose();
      m.bottomLeftCorner(n, n) = V * c.asDiagonal() * V.transpose();
      m.bottomRightCorner(n, n) = m.topLeftCorner(n, n);
      theta[j] = m;
    }
  } else if (constant_coeffs) {
    const Eigen::MatrixXd estep = (h * symplectic_generator(H, 0.0)).exp();
    for (std::size_t j = 1; j <= nfine; ++j) theta[j] = estep * theta[j - 1];
  } else {
    for (std::size_t j = 0; j < nfine; ++j) {
      const double t0 = static_cast<double>(j) * h;
      const Eigen::MatrixXd g1 = symplectic_generator(H, t0);
      const Eigen::MatrixXd g2 = symplectic_generator(H, t0 + 0.5 * h);
      const Eigen::MatrixXd g3 = symplectic_generator(H, t0 + h);
      const Eigen::MatrixXd k1 = g1 * theta[j];
      const Eigen::MatrixXd k2 = g2 * (theta[j] + (0.5 * h) * k1);
      const Eigen::MatrixXd k3 = g2 * (theta[j] + (0.5 * h) * k2);
      const Eigen::MatrixXd k4 = g3 * (theta[j] + h * k3);
      theta[j + 1] = theta[j] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  const bool driven = !H.source_free();

  // Integrand of the Duhamel term, theta^{-1}(t').(-nu, mu), at fine nodes.
  std::vector<Eigen::VectorXd> u;
  if (driven) {
    u.resize(nfine + 1);
    for (std::size_t j = 0; j <= nfine; ++j) {
      const double tj = static_cast<double>(j) * h;
      Eigen::VectorXd v(2 * n);
      v.head(n) = -H.nu(tj);
      v.tail(n) = H.mu(tj);
      u[j] = symplectic_inverse(SymplecticBlocks::from_matrix(tj, theta[j])) * v;
    }
  }

  path.spacing = 2.0 * h;
  path.blocks.reserve(nfine / 2 + 1);
  path.responses.reserve(nfine / 2 + 1);
  Eigen::VectorXd prefix = Eigen::VectorXd::Zero(2 * n);
  for (std::size_t j = 0; j <= nfine; j += 2) {
    if (driven && j > 0)
      prefix += (h / 3.0) * (u[j - 2] + 4.0 * u[j - 1] + u[j]);
    SymplecticBlocks blocks =
        SymplecticBlocks::from_matrix(static_cast<double>(j) * h, theta[j]);
    SourceResponse resp;
    resp.t = blocks.t;
    if (driven) {
      const Eigen::VectorXd full = theta[j] * prefix;
      resp.eta = full.head(n);
      resp.xi = full.tail(n);
    } else {
      resp.eta = Eigen::VectorXd::Zero(n);
      resp.xi = Eigen::VectorXd::Zero(n);
    }
    attach_zeta(resp, blocks, H.K(blocks.t).cwiseAbs().maxCoeff() * blocks.t);
    path.responses.push_back(std::move(resp));
    path.blocks.push_back(std::move(blocks));
  }
  return path;
}

SourceResponse source_response(const QuadraticHamiltonian& H, double t, double step) {
  return propagate_path(H, t, step).responses.back();
}

}  // namespace qprop
