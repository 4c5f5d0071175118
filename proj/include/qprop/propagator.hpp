#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qprop/chains.hpp"
#include "qprop/evolution.hpp"
#include "qprop/grid.hpp"
#include "qprop/hamiltonian.hpp"

namespace qprop {

/// Matrix coefficients of the Gaussian kernel
///   K(q,t|q',0) = exp(log_amp + i theta)
///     * exp{ (i/hbar) [ q.DBinv.q/2 + q'.BinvA.q'/2 - q'.Binv.q
///                       + q.zeta + q'.Binv.eta ] }.
/// The q' source coupling carries B^{-1}; that is what the defining pair of
/// first-order conditions on ln K demands, and it reduces to the textbook
/// driven-oscillator kernel.
struct KernelParams {
  double t = 0.0;
  int n = 1;
  Eigen::MatrixXd DBinv;  // D_t . B_t^{-1}
  Eigen::MatrixXd BinvA;  // B_t^{-1} . A_t
  Eigen::MatrixXd Binv;   // B_t^{-1}
  Eigen::VectorXd zeta;
  Eigen::VectorXd eta;
  double theta_phase = 0.0;  // radians
  double log_amp = 0.0;      // log of 1/sqrt((2 pi hbar)^n |det B_t|)
  double hbar = 1.0;

  /// Worst relative asymmetry of DBinv and BinvA (both are symmetric for
  /// exactly symplectic blocks).
  double symmetry_defect() const;
};

/// Kernel phase
///   theta(t) = -n pi/4 - (1/2 hbar) \int_0^t [zeta.K.zeta - 2 nu.zeta] dt'
/// by composite Simpson over a uniform path (odd node count, node 0 at time
/// 0). The t'=0 integrand uses the analytic limit zeta(0+) = K(0)^{-1}.nu(0).
double phase_theta(const QuadraticHamiltonian& H, const std::vector<SymplecticBlocks>& blocks_path,
                   const std::vector<SourceResponse>& responses);

/// b_scale: characteristic magnitude of B_t for the caustic test (pass
/// |K(t)| * t when the Hamiltonian is known; 0 falls back to |B|_max).
KernelParams kernel_params(const SymplecticBlocks& blocks, const SourceResponse& resp,
                           double theta, double hbar, double b_scale = 0.0);

std::complex<double> kernel_eval(const KernelParams& params, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& q_prime);

/// Full pipeline: integrate the fundamental matrix and sources over [0, t],
/// accumulate the phase, and assemble the kernel coefficients at t.
struct PropagationResult {
  SymplecticBlocks blocks;
  SourceResponse response;
  double theta = 0.0;
  KernelParams params;
};
PropagationResult propagate(const QuadraticHamiltonian& H, double t, double step);

/// Stiffness below which a mode counts as free (f = g = m/t).
inline constexpr double kZeroModeTol = 1e-12;
/// |sin(w t)| below which a mode sits on a caustic.
inline constexpr double kModeCausticTol = 1e-10;

/// Normal-mode kernel coefficients f(z) = sqrt(m z) cot(t sqrt(z/m)) and
/// g(z) = sqrt(m z) / sin(t sqrt(z/m)); m/t limits for z < kZeroModeTol.
struct ModeKernel {
  double f = 0.0;
  double g = 0.0;
};
ModeKernel mode_kernel(double z, double t, double m);

/// Per-mode 1-D kernel data for a factorized normal-coordinate propagator
/// at fixed time t, including the source terms in normal coordinates.
struct ModeKernels {
  double t = 0.0;
  double hbar = 1.0;
  double mass = 1.0;
  Eigen::VectorXd f, g;
  Eigen::VectorXd zeta_n, eta_n;  // normal-coordinate sources at t (zero if undriven)
  double source_phase = 0.0;      // -(1/2 hbar) \int |zeta|^2 / m
};

ModeKernels make_mode_kernels(const ModeDecomposition& modes, double t, double hbar);
ModeKernels make_mode_kernels(const ModeDecomposition& modes, double t, double hbar,
                              const std::vector<SourceResponse>& resp_path);

/// psi(q~, t) = \int K(q~,t|q~',0) psi(q~',0) dq~' on the normal-coordinate
/// grid, evaluated as one 1-D trapezoid quadrature per mode. Throws
/// GridResolutionError when the norm drifts by more than norm_tol.
GridState evolve_wavefunction(const ModeDecomposition& modes,
                              const std::vector<SourceResponse>& resp_path,
                              const GridState& psi0, double t, double hbar,
                              double norm_tol = 1e-3);

GridState evolve_wavefunction(const ModeKernels& kernels, const GridState& psi0,
                              double norm_tol = 1e-3);

/// rho(q,q',t) = \int\int K(q,t|x,0) rho(x,y,0) conj(K(q',t|y,0)) dx dy on a
/// doubled grid (axes x_1..x_n, y_1..y_n).
GridState evolve_density(const ModeDecomposition& modes,
                         const std::vector<SourceResponse>& resp_path, const GridState& rho0,
                         double t, double hbar, double norm_tol = 1e-3);

GridState evolve_density(const ModeKernels& kernels, const GridState& rho0,
                         double norm_tol = 1e-3);

/// Trace of a density grid, sum_i rho(i, i) dV^{1/2}-weighted; rho lives on
/// 2n axes with matching q and q' axes.
std::complex<double> density_trace(const GridState& rho);

}  // namespace qprop
