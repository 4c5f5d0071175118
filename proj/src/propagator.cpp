#include "qprop/propagator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qprop/errors.hpp"
#include "qprop/quadrature.hpp"

namespace qprop {

namespace {

double relative_asymmetry(const Eigen::MatrixXd& M) {
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff() / scale;
}

void check_uniform_path(const std::vector<SymplecticBlocks>& blocks,
                        const std::vector<SourceResponse>& responses) {
  if (blocks.size() != responses.size())
    throw std::invalid_argument("path and responses must have matching nodes");
  if (blocks.empty()) throw std::invalid_argument("empty propagation path");
  if (blocks.front().t != 0.0) throw std::invalid_argument("path must start at t=0");
  if (blocks.size() == 1) return;
  if (blocks.size() % 2 == 0)
    throw std::invalid_argument("path needs an odd node count for Simpson quadrature");
  const double h = blocks[1].t - blocks[0].t;
  const double tol = 1e-9 * std::max(blocks.back().t, 1.0);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const double expected = static_cast<double>(j) * h;
    if (std::abs(blocks[j].t - expected) > tol || std::abs(responses[j].t - expected) > tol)
      throw std::invalid_argument("path nodes must be uniformly spaced");
  }
}

}  // namespace

double KernelParams::symmetry_defect() const {
  return std::max(relative_asymmetry(DBinv), relative_asymmetry(BinvA));
}

double phase_theta(const QuadraticHamiltonian& H,
                   const std::vector<SymplecticBlocks>& blocks_path,
                   const std::vector<SourceResponse>& responses) {
  check_uniform_path(blocks_path, responses);
  const double base = -H.n * std::numbers::pi / 4.0;  // e^{i theta(0)} = i^{-n/2}
  if (H.source_free() || blocks_path.size() == 1) return base;

  // The integrand is zeta.K.zeta - 2 nu.zeta. The nu term is demanded by the
  // Schroedinger equation (scalar part of H acting on the Gaussian ansatz
  // contributes -nu.zeta through the -nu.p coupling); it vanishes for the
  // common nu = 0 case.
  const std::size_t m = blocks_path.size();
  std::vector<double> w(m);
  const Eigen::VectorXd nu0 = H.nu(0.0);
  if (nu0.cwiseAbs().maxCoeff() == 0.0) {
    w[0] = 0.0;
  } else {
    // t' -> 0 limit, where zeta -> K(0)^{-1}.nu(0).
    Eigen::FullPivLU<Eigen::MatrixXd> lu(H.K(0.0));
    if (!lu.isInvertible())
      throw std::runtime_error("phase integrand undefined: K(0) singular with nu(0) != 0");
    w[0] = -nu0.dot(lu.solve(nu0));
  }
  for (std::size_t j = 1; j < m; ++j) {
    const Eigen::VectorXd& zeta = responses[j].zeta_or_throw();
    const double tj = responses[j].t;
    w[j] = zeta.dot(H.K(tj) * zeta) - 2.0 * H.nu(tj).dot(zeta);
  }
  const double h = blocks_path[1].t - blocks_path[0].t;
  return base - simpson(w, h) / (2.0 * H.hbar);
}

KernelParams kernel_params(const SymplecticBlocks& blocks, const SourceResponse& resp,
                           double theta, double hbar, double b_scale) {
  const int n = blocks.dim();
  if (is_caustic(blocks.B, b_scale))
    throw CausticError("det B(t) below caustic threshold at t=" + std::to_string(blocks.t));

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(blocks.B);
  const double detB = lu.determinant();

  KernelParams p;
  p.t = blocks.t;
  p.n = n;
  p.hbar = hbar;
  p.Binv = lu.inverse();
  p.DBinv = blocks.D * p.Binv;
  p.BinvA = p.Binv * blocks.A;
  p.eta = resp.eta;
  p.zeta = resp.xi - blocks.D * lu.solve(resp.eta);
  p.theta_phase = theta;
  p.log_amp = -0.5 * n * std::log(2.0 * std::numbers::pi * hbar) - 0.5 * std::log(std::abs(detB));
  return p;
}

std::complex<double> kernel_eval(const KernelParams& params, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& q_prime) {
  if (q.size() != params.n || q_prime.size() != params.n)
    throw std::invalid_argument("kernel_eval: coordinate dimension mismatch");
  const double quad = 0.5 * q.dot(params.DBinv * q) + 0.5 * q_prime.dot(params.BinvA * q_prime) -
                      q_prime.dot(params.Binv * q) + q.dot(params.zeta) +
                      q_prime.dot(params.Binv * params.eta);
  return std::exp(std::complex<double>(params.log_amp, params.theta_phase + quad / params.hbar));
}

PropagationResult propagate(const QuadraticHamiltonian& H, double t, double step) {
  PropagationResult out;
  PropagationPath path = propagate_path(H, t, step);
  out.theta = phase_theta(H, path.blocks, path.responses);
  out.blocks = std::move(path.blocks.back());
  out.response = std::move(path.responses.back());
  const double b_scale = H.K(t).cwiseAbs().maxCoeff() * t;
  out.params = kernel_params(out.blocks, out.response, out.theta, H.hbar, b_scale);
  return out;
}

ModeKernel mode_kernel(double z, double t, double m) {
  if (!(t > 0.0)) throw std::invalid_argument("mode_kernel: t must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("mode_kernel: mass must be positive");
  if (z < -kZeroModeTol) throw std::invalid_argument("mode_kernel: stiffness must be >= 0");
  if (z < kZeroModeTol) return {m / t, m / t};  // free mode
  const double w = std::sqrt(z / m);
  const double s = std::sin(w * t);
  if (std::abs(s) < kModeCausticTol)
    throw CausticError("mode caustic: sin(w t) ~ 0 at w t = " + std::to_string(w * t));
  return {m * w * std::cos(w * t) / s, m * w / s};
}

ModeKernels make_mode_kernels(const ModeDecomposition& modes, double t, double hbar) {
  const int n = modes.size();
  ModeKernels k;
  k.t = t;
  k.hbar = hbar;
  k.mass = modes.mass;
  k.f.resize(n);
  k.g.resize(n);
  for (int i = 0; i < n; ++i) {
    const ModeKernel mk = mode_kernel(modes.z[i], t, modes.mass);
    k.f[i] = mk.f;
    k.g[i] = mk.g;
  }
  k.zeta_n = Eigen::VectorXd::Zero(n);
  k.eta_n = Eigen::VectorXd::Zero(n);
  k.source_phase = 0.0;
  return k;
}

ModeKernels make_mode_kernels(const ModeDecomposition& modes, double t, double hbar,
                              const std::vector<SourceResponse>& resp_path) {
  ModeKernels k = make_mode_kernels(modes, t, hbar);
  if (resp_path.empty()) return k;
  if (std::abs(resp_path.back().t - t) > 1e-9 * std::max(t, 1.0))
    throw std::invalid_argument("response path must end at the evolution time");
  if (resp_path.size() > 1) {
    if (resp_path.size() % 2 == 0)
      throw std::invalid_argument("response path needs an odd node count");
    std::vector<double> w(resp_path.size());
    for (std::size_t j = 0; j < resp_path.size(); ++j) {
      const Eigen::VectorXd& zeta = resp_path[j].zeta_or_throw();
      w[j] = zeta.squaredNorm() / modes.mass;
    }
    const double h = resp_path[1].t - resp_path[0].t;
    k.source_phase = -simpson(w, h) / (2.0 * hbar);
  }
  k.zeta_n = transform_coords(modes, resp_path.back().zeta_or_throw());
  k.eta_n = transform_coords(modes, resp_path.back().eta);
  return k;
}

namespace {

Eigen::MatrixXcd mode_matrix(const ModeKernels& k, int mode, const GridAxis& axis) {
  const int count = axis.count;
  const double dq = axis.spacing();
  Eigen::MatrixXcd M(count, count);
  const double f = k.f[mode];
  const double g = k.g[mode];
  const double zn = k.zeta_n[mode];
  const double en = k.eta_n[mode];
  for (int i = 0; i < count; ++i) {
    const double qi = axis.coord(i);
    for (int j = 0; j < count; ++j) {
      const double qj = axis.coord(j);
      const double weight = (j == 0 || j == count - 1) ? 0.5 * dq : dq;  // trapezoid
      // the q' source coupling is B^{-1} eta, i.e. g(z) eta per mode
      const double phase =
          (0.5 * (qi * qi + qj * qj) * f - qi * qj * g + qi * zn + qj * g * en) / k.hbar;
      M(i, j) = std::polar(weight, phase);
    }
  }
  return M;
}

std::complex<double> kernel_scalar(const ModeKernels& k) {
  double log_amp = 0.0;
  for (int i = 0; i < k.f.size(); ++i)
    log_amp += 0.5 * std::log(std::abs(k.g[i]) / (2.0 * std::numbers::pi * k.hbar));
  const double theta =
      -static_cast<double>(k.f.size()) * std::numbers::pi / 4.0 + k.source_phase;
  return std::exp(std::complex<double>(log_amp, theta));
}

}  // namespace

GridState evolve_wavefunction(const ModeKernels& kernels, const GridState& psi0,
                              double norm_tol) {
  const int n = static_cast<int>(kernels.f.size());
  if (static_cast<int>(psi0.axes.size()) != n)
    throw std::invalid_argument("state grid rank does not match mode count");
  const double norm_in = psi0.norm();

  GridState out = psi0;
  for (int k = 0; k < n; ++k) contract_axis(out, k, mode_matrix(kernels, k, out.axes[k]));
  out.scale(kernel_scalar(kernels));

  if (norm_in > 0.0) {
    const double drift = std::abs(out.norm() - norm_in) / norm_in;
    if (drift > norm_tol)
      throw GridResolutionError("norm drift " + std::to_string(drift) +
                                " exceeds bound; grid too coarse");
  }
  return out;
}

GridState evolve_wavefunction(const ModeDecomposition& modes,
                              const std::vector<SourceResponse>& resp_path,
                              const GridState& psi0, double t, double hbar, double norm_tol) {
  return evolve_wavefunction(make_mode_kernels(modes, t, hbar, resp_path), psi0, norm_tol);
}

std::complex<double> density_trace(const GridState& rho) {
  const int rank = static_cast<int>(rho.axes.size());
  if (rank % 2 != 0) throw std::invalid_argument("density grid needs an even axis count");
  const int n = rank / 2;
  for (int k = 0; k < n; ++k) {
    const GridAxis &a = rho.axes[k], &b = rho.axes[n + k];
    if (a.count != b.count || a.min != b.min || a.max != b.max)
      throw std::invalid_argument("density grid q and q' axes must match");
  }
  std::vector<std::size_t> stride(rank, 1);
  for (int k = rank - 2; k >= 0; --k)
    stride[k] = stride[k + 1] * static_cast<std::size_t>(rho.axes[k + 1].count);

  double dv = 1.0;
  for (int k = 0; k < n; ++k) dv *= rho.axes[k].spacing();

  std::complex<double> tr = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    std::size_t flat = 0;
    for (int k = 0; k < n; ++k) flat += static_cast<std::size_t>(idx[k]) * (stride[k] + stride[n + k]);
    tr += rho.values[flat];
    int k = n - 1;
    for (; k >= 0; --k) {
      if (++idx[k] < rho.axes[k].count) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  return tr * dv;
}

GridState evolve_density(const ModeKernels& kernels, const GridState& rho0, double norm_tol) {
  const int n = static_cast<int>(kernels.f.size());
  if (static_cast<int>(rho0.axes.size()) != 2 * n)
    throw std::invalid_argument("density grid rank must be twice the mode count");
  const std::complex<double> tr_in = density_trace(rho0);

  GridState out = rho0;
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXcd M = mode_matrix(kernels, k, out.axes[k]);
    contract_axis(out, k, M);
    contract_axis(out, n + k, M.conjugate());
  }
  const std::complex<double> c = kernel_scalar(kernels);
  out.scale(c * std::conj(c));  // real: phases cancel between K and conj(K)

  if (std::abs(tr_in) > 1e-12) {
    const double drift = std::abs(density_trace(out) - tr_in) / std::abs(tr_in);
    if (drift > norm_tol)
      throw GridResolutionError("trace drift " + std::to_string(drift) +
                                " exceeds bound; grid too coarse");
  }
  return out;
}

GridState evolve_density(const ModeDecomposition& modes,
                         const std::vector<SourceResponse>& resp_path, const GridState& rho0,
                         double t, double hbar, double norm_tol) {
  return evolve_density(make_mode_kernels(modes, t, hbar, resp_path), rho0, norm_tol);
}

}  // namespace qprop
