#include "qprop/hamiltonian.hpp"

#include <cmath>
#include <limits>

namespace qprop {

namespace {

double symmetry_defect(const Eigen::MatrixXd& M) {
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

QuadraticHamiltonian QuadraticHamiltonian::isotropic_oscillator(int n, double mass, double omega,
                                                                double hbar) {
  QuadraticHamiltonian H;
  H.n = n;
  H.hbar = hbar;
  H.Z = MatrixTimeDep::constant(mass * omega * omega *
                                Eigen::MatrixXd::Identity(n, n));
  H.L = MatrixTimeDep::constant(Eigen::MatrixXd::Zero(n, n));
  H.K = MatrixTimeDep::constant((1.0 / mass) * Eigen::MatrixXd::Identity(n, n));
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Zero(n));
  H.nu = VectorTimeDep::constant(Eigen::VectorXd::Zero(n));
  return H;
}

ValidationReport validate(const QuadraticHamiltonian& H, const std::vector<double>& times) {
  ValidationReport report;
  if (times.empty()) {
    report.issues.push_back("no sample times given");
    return report;
  }
  if (H.n < 1) {
    report.issues.push_back("n must be >= 1");
    return report;
  }
  if (!(H.hbar > 0.0)) {
    report.issues.push_back("hbar must be positive");
    return report;
  }
  for (double t : times) {
    if (!std::isfinite(t)) {
      report.issues.push_back("non-finite sample time");
      return report;
    }
    const Eigen::MatrixXd Zt = H.Z(t);
    const Eigen::MatrixXd Lt = H.L(t);
    const Eigen::MatrixXd Kt = H.K(t);
    const Eigen::VectorXd mut = H.mu(t);
    const Eigen::VectorXd nut = H.nu(t);
    if (Zt.rows() != H.n || Zt.cols() != H.n || Lt.rows() != H.n || Lt.cols() != H.n ||
        Kt.rows() != H.n || Kt.cols() != H.n) {
      report.issues.push_back("matrix dimension mismatch at t=" + std::to_string(t));
      return report;
    }
    if (mut.size() != H.n || nut.size() != H.n) {
      report.issues.push_back("source vector dimension mismatch at t=" + std::to_string(t));
      return report;
    }
    report.z_defect = std::max(report.z_defect, symmetry_defect(Zt));
    report.k_defect = std::max(report.k_defect, symmetry_defect(Kt));
  }
  if (report.z_defect > kSymmetryTol)
    report.issues.push_back("Z(t) symmetry defect " + std::to_string(report.z_defect));
  if (report.k_defect > kSymmetryTol)
    report.issues.push_back("K(t) symmetry defect " + std::to_string(report.k_defect));
  report.passed = report.issues.empty();
  return report;
}

Eigen::MatrixXd w_matrix(const QuadraticHamiltonian& H, double t) {
  const int n = H.n;
  Eigen::MatrixXd w(2 * n, 2 * n);
  const Eigen::MatrixXd Lt = H.L(t);
  w.topLeftCorner(n, n) = H.Z(t);
  w.topRightCorner(n, n) = Lt.transpose();
  w.bottomLeftCorner(n, n) = Lt;
  w.bottomRightCorner(n, n) = H.K(t);
  return w;
}

Eigen::MatrixXd symplectic_form(int n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  s.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return s;
}

Eigen::MatrixXd symplectic_generator(const QuadraticHamiltonian& H, double t) {
  const int n = H.n;
  Eigen::MatrixXd g(2 * n, 2 * n);
  const Eigen::MatrixXd Lt = H.L(t);
  g.topLeftCorner(n, n) = Lt;
  g.topRightCorner(n, n) = H.K(t);
  g.bottomLeftCorner(n, n) = -H.Z(t);
  g.bottomRightCorner(n, n) = -Lt.transpose();
  return g;
}

}  // namespace qprop
