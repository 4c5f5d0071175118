#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qprop/errors.hpp"
#include "qprop/propagator.hpp"
#include "test_util.hpp"

using namespace qprop;

namespace {

constexpr double kPi = std::numbers::pi;

ModeDecomposition single_mode(double mass, double omega) {
  ModeDecomposition d;
  d.z = Eigen::VectorXd::Constant(1, mass * omega * omega);
  d.V = Eigen::MatrixXd::Identity(1, 1);
  d.omega = Eigen::VectorXd::Constant(1, omega);
  d.mass = mass;
  return d;
}

GridAxis default_axis() { return {-8.0, 8.0, 1024}; }

GridState ground_state(const GridAxis& axis, double mass, double omega, double center = 0.0) {
  const double sigma = std::sqrt(1.0 / (2.0 * mass * omega));  // hbar = 1
  return gaussian_state({axis}, Eigen::VectorXd::Constant(1, center),
                        Eigen::VectorXd::Constant(1, sigma), Eigen::VectorXd::Zero(1), 1.0);
}

double first_moment(const GridState& psi) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < psi.axes[0].count; ++i) {
    const double p = std::norm(psi.values[i]);
    num += psi.axes[0].coord(i) * p;
    den += p;
  }
  return num / den;
}

}  // namespace

TEST_CASE("mode kernel zero-mode limit", "[propagator]") {
  const double m = 1.3, t = 0.7;
  const ModeKernel mk = mode_kernel(0.0, t, m);
  CHECK(mk.f == Catch::Approx(m / t).margin(1e-12));
  CHECK(mk.g == Catch::Approx(m / t).margin(1e-12));
}

TEST_CASE("mode kernel matches the periodic-chain displays", "[propagator]") {
  const double m = 1.2, w0 = 0.9, t = 0.6;
  const ModeKernel mk = mode_kernel(3.0 * m * w0 * w0, t, m);
  const double w = std::sqrt(3.0) * w0;
  CHECK(mk.f == Catch::Approx(std::sqrt(3.0) * m * w0 / std::tan(w * t)).epsilon(1e-12));
  CHECK(mk.g == Catch::Approx(std::sqrt(3.0) * m * w0 / std::sin(w * t)).epsilon(1e-12));
}

TEST_CASE("mode kernel matches the Dirichlet-chain displays", "[propagator]") {
  const double m = 1.0, w0 = 1.0, t = 0.8;
  const ModeKernel mk = mode_kernel(2.0 * m * w0 * w0, t, m);
  const double w = std::numbers::sqrt2 * w0;
  CHECK(mk.f == Catch::Approx(std::numbers::sqrt2 * m * w0 / std::tan(w * t)).epsilon(1e-12));
}

TEST_CASE("mode kernel refuses caustics", "[propagator]") {
  const double m = 1.0, omega = 1.0;
  CHECK_THROWS_AS(mode_kernel(m * omega * omega, kPi / omega, m), CausticError);
}

TEST_CASE("phase is -n pi/4 without sources", "[propagator]") {
  for (int n : {1, 2, 3}) {
    const auto H = QuadraticHamiltonian::isotropic_oscillator(n, 1.1, 0.9);
    const auto result = propagate(H, 0.8, 1e-3);
    CHECK(result.theta == Catch::Approx(-n * kPi / 4.0).margin(1e-14));
  }
}

TEST_CASE("driven oscillator phase matches the analytic integral", "[propagator]") {
  // zeta(t) = (f0/w) tan(w t / 2) for a constant force, so the phase integral
  // is (f0^2/(m w^2)) [ (2/w) tan(w t/2) - t ].
  const double m = 1.3, omega = 0.9, f0 = 0.5, t = 1.1;
  QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, f0));
  const auto result = propagate(H, t, 1e-3);
  const double integral = (f0 * f0 / (m * omega * omega)) *
                          (2.0 / omega * std::tan(omega * t / 2.0) - t);
  CHECK(result.theta == Catch::Approx(-kPi / 4.0 - 0.5 * integral).margin(1e-10));
}

TEST_CASE("phase adds over decoupled subsystems", "[propagator]") {
  const double m = 1.0, w1 = 0.8, w2 = 1.7, f1 = 0.4, f2 = -0.6, t = 0.9;
  auto oscillator = [&](double w, double f) {
    QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, w);
    H.mu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, f));
    return H;
  };
  QuadraticHamiltonian pair;
  pair.n = 2;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
  Z(0, 0) = m * w1 * w1;
  Z(1, 1) = m * w2 * w2;
  pair.Z = MatrixTimeDep::constant(Z);
  pair.L = MatrixTimeDep::constant(Eigen::MatrixXd::Zero(2, 2));
  pair.K = MatrixTimeDep::constant((1.0 / m) * Eigen::MatrixXd::Identity(2, 2));
  pair.mu = VectorTimeDep::constant((Eigen::VectorXd(2) << f1, f2).finished());
  pair.nu = VectorTimeDep::constant(Eigen::VectorXd::Zero(2));

  const double theta_pair = propagate(pair, t, 1e-3).theta;
  const double theta_sum =
      propagate(oscillator(w1, f1), t, 1e-3).theta + propagate(oscillator(w2, f2), t, 1e-3).theta;
  CHECK(theta_pair == Catch::Approx(theta_sum).margin(1e-10));
}

TEST_CASE("kernel params of the bare oscillator", "[propagator]") {
  const double m = 1.2, omega = 0.7, t = 0.9;
  const auto H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  const auto result = propagate(H, t, 1e-3);
  CHECK(result.params.DBinv(0, 0) ==
        Catch::Approx(m * omega / std::tan(omega * t)).epsilon(1e-12));
  CHECK(result.params.BinvA(0, 0) ==
        Catch::Approx(m * omega / std::tan(omega * t)).epsilon(1e-12));
  CHECK(result.params.Binv(0, 0) ==
        Catch::Approx(m * omega / std::sin(omega * t)).epsilon(1e-12));
  CHECK(std::exp(result.params.log_amp) ==
        Catch::Approx(std::sqrt(m * omega / (2.0 * kPi * std::sin(omega * t)))).epsilon(1e-12));
}

TEST_CASE("kernel params diverge like m/t as t -> 0+", "[propagator]") {
  const double m = 1.5, t = 1e-4;
  const auto H = QuadraticHamiltonian::isotropic_oscillator(1, m, 1.0);
  const auto result = propagate(H, t, 1e-5);
  CHECK(result.params.DBinv(0, 0) == Catch::Approx(m / t).epsilon(1e-6));
  CHECK(std::isfinite(result.params.log_amp));
}

TEST_CASE("kernel params stay symmetric for random symplectic blocks", "[propagator]") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    // exponentiate s.(symmetric) to get a random symplectic matrix
    QuadraticHamiltonian H;
    H.n = n;
    H.Z = MatrixTimeDep::constant(test::random_symmetric(n, rng));
    H.L = MatrixTimeDep::constant(test::random_matrix(n, rng));
    H.K = MatrixTimeDep::constant(test::random_symmetric(n, rng));
    H.mu = VectorTimeDep::constant(Eigen::VectorXd::Zero(n));
    H.nu = VectorTimeDep::constant(Eigen::VectorXd::Zero(n));
    const auto blocks = fundamental_matrix(H, 0.9, 1e-3);
    if (is_caustic(blocks.B)) continue;
    SourceResponse resp;
    resp.t = blocks.t;
    resp.eta = Eigen::VectorXd::Zero(n);
    resp.xi = Eigen::VectorXd::Zero(n);
    const auto params = kernel_params(blocks, resp, 0.0, 1.0);
    CHECK(params.symmetry_defect() < 1e-8);
  }
}

TEST_CASE("free-particle kernel value", "[propagator]") {
  QuadraticHamiltonian H;
  H.n = 1;
  H.Z = MatrixTimeDep::constant(Eigen::MatrixXd::Zero(1, 1));
  H.L = MatrixTimeDep::constant(Eigen::MatrixXd::Zero(1, 1));
  H.K = MatrixTimeDep::constant(Eigen::MatrixXd::Identity(1, 1));  // mass 1
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Zero(1));
  H.nu = VectorTimeDep::constant(Eigen::VectorXd::Zero(1));
  const auto result = propagate(H, 1.0, 1e-3);
  const auto k = kernel_eval(result.params, Eigen::VectorXd::Constant(1, 1.0),
                             Eigen::VectorXd::Zero(1));
  CHECK(std::abs(k) == Catch::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-12));
  CHECK(std::arg(k) == Catch::Approx(0.5 - kPi / 4.0).margin(1e-12));
}

TEST_CASE("undriven kernel is symmetric in q and q'", "[propagator]") {
  const auto H = QuadraticHamiltonian::isotropic_oscillator(1, 1.0, 1.0);
  const auto result = propagate(H, 1.1, 1e-3);
  const auto a = kernel_eval(result.params, Eigen::VectorXd::Constant(1, 0.7),
                             Eigen::VectorXd::Constant(1, -0.4));
  const auto b = kernel_eval(result.params, Eigen::VectorXd::Constant(1, -0.4),
                             Eigen::VectorXd::Constant(1, 0.7));
  CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("kernel modulus matches the driven-oscillator prefactor", "[propagator]") {
  const double m = 1.2, omega = 0.9;
  const auto H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> qdist(-2.0, 2.0);
  // includes times past the first caustic, where sin(w t) < 0
  for (double t : {0.4, kPi / (2.0 * omega), 2.8, 4.0}) {
    const auto result = propagate(H, t, 1e-3);
    const double expected = std::sqrt(m * omega / (2.0 * kPi * std::abs(std::sin(omega * t))));
    for (int i = 0; i < 5; ++i) {
      const auto k = kernel_eval(result.params, Eigen::VectorXd::Constant(1, qdist(rng)),
                                 Eigen::VectorXd::Constant(1, qdist(rng)));
      CHECK(std::abs(k) == Catch::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("driven kernel satisfies the Schroedinger equation", "[propagator]") {
  // i hbar dK/dt = [ -hbar^2/(2m) d^2/dq^2 + m w^2 q^2/2 - f0 q ] K, checked
  // with central finite differences; validates theta, the amplitude and both
  // source couplings at once.
  const double m = 1.0, omega = 1.0, f0 = 0.3, t = 0.9;
  QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, f0));

  const double q = 0.7, qp = -0.4;
  const double dt = 1e-4, dq = 1e-4;
  auto eval = [&](double time, double pos) {
    const auto result = propagate(H, time, 2e-5);
    return kernel_eval(result.params, Eigen::VectorXd::Constant(1, pos),
                       Eigen::VectorXd::Constant(1, qp));
  };
  const std::complex<double> k0 = eval(t, q);
  const std::complex<double> ddt = (eval(t + dt, q) - eval(t - dt, q)) / (2.0 * dt);
  const std::complex<double> d2dq =
      (eval(t, q + dq) - 2.0 * k0 + eval(t, q - dq)) / (dq * dq);

  const std::complex<double> lhs = std::complex<double>(0.0, 1.0) * ddt;
  const std::complex<double> rhs =
      -0.5 / m * d2dq + (0.5 * m * omega * omega * q * q - f0 * q) * k0;
  CHECK(std::abs(lhs - rhs) / std::abs(k0) < 1e-5);
}

TEST_CASE("time-dependent kernel satisfies the Schroedinger equation", "[propagator]") {
  // ramped stiffness plus both source types; the momentum source enters the
  // operator as +i hbar nu d/dq
  const double m = 1.0, omega = 1.1, f0 = 0.3, nu0 = 0.2, t = 0.8;
  QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  H.Z = MatrixTimeDep::preset(m * omega * omega * Eigen::MatrixXd::Identity(1, 1),
                              Profile::QuadraticRamp, 1.0, 0.1);
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, f0));
  H.nu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, nu0));

  const double q = 0.5, qp = -0.3;
  const double dt = 1e-4, dq = 1e-4;
  auto eval = [&](double time, double pos) {
    const auto result = propagate(H, time, 2e-5);
    return kernel_eval(result.params, Eigen::VectorXd::Constant(1, pos),
                       Eigen::VectorXd::Constant(1, qp));
  };
  const std::complex<double> k0 = eval(t, q);
  const std::complex<double> ddt = (eval(t + dt, q) - eval(t - dt, q)) / (2.0 * dt);
  const std::complex<double> kq_p = eval(t, q + dq);
  const std::complex<double> kq_m = eval(t, q - dq);
  const std::complex<double> ddq = (kq_p - kq_m) / (2.0 * dq);
  const std::complex<double> d2dq = (kq_p - 2.0 * k0 + kq_m) / (dq * dq);

  const double zt = H.Z(t)(0, 0);
  const std::complex<double> lhs = std::complex<double>(0.0, 1.0) * ddt;
  const std::complex<double> rhs = -0.5 / m * d2dq + (0.5 * zt * q * q - f0 * q) * k0 +
                                   std::complex<double>(0.0, nu0) * ddq;
  CHECK(std::abs(lhs - rhs) / std::abs(k0) < 1e-5);
}

TEST_CASE("cross-term kernel satisfies the Schroedinger equation", "[propagator]") {
  // L != 0 takes the matrix-exponential route; the symmetrized coupling
  // q.L^T p/2 + p.L q/2 acts as -i L q d/dq - i L/2 in one dimension
  const double m = 1.0, omega = 1.1, ell = 0.3, t = 0.8;
  QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  H.L = MatrixTimeDep::constant(Eigen::MatrixXd::Constant(1, 1, ell));

  const double q = 0.5, qp = -0.3;
  const double dt = 1e-4, dq = 1e-4;
  auto eval = [&](double time, double pos) {
    const auto result = propagate(H, time, 2e-5);
    return kernel_eval(result.params, Eigen::VectorXd::Constant(1, pos),
                       Eigen::VectorXd::Constant(1, qp));
  };
  const std::complex<double> k0 = eval(t, q);
  const std::complex<double> ddt = (eval(t + dt, q) - eval(t - dt, q)) / (2.0 * dt);
  const std::complex<double> kq_p = eval(t, q + dq);
  const std::complex<double> kq_m = eval(t, q - dq);
  const std::complex<double> ddq = (kq_p - kq_m) / (2.0 * dq);
  const std::complex<double> d2dq = (kq_p - 2.0 * k0 + kq_m) / (dq * dq);

  const std::complex<double> lhs = std::complex<double>(0.0, 1.0) * ddt;
  const std::complex<double> rhs = -0.5 / m * d2dq +
                                   0.5 * m * omega * omega * q * q * k0 +
                                   std::complex<double>(0.0, -ell) * q * ddq +
                                   std::complex<double>(0.0, -0.5 * ell) * k0;
  CHECK(std::abs(lhs - rhs) / std::abs(k0) < 1e-5);
}

TEST_CASE("kernel params refuse the caustic time", "[propagator]") {
  const double m = 1.0, omega = 1.0;
  const auto H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  CHECK_THROWS_AS(propagate(H, kPi / omega, 1e-3), CausticError);
}

TEST_CASE("stationary ground state keeps its modulus", "[propagator]") {
  const double m = 1.0, omega = 1.0;
  const auto modes = single_mode(m, omega);
  const GridState psi0 = ground_state(default_axis(), m, omega);
  const GridState psi = evolve_wavefunction(modes, {}, psi0, 0.4, 1.0);
  for (int i = 0; i < psi0.axes[0].count; i += 37)
    CHECK(std::abs(psi.values[i]) == Catch::Approx(std::abs(psi0.values[i])).margin(1e-7));
  CHECK(psi.norm() == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("displaced gaussian follows the classical trajectory", "[propagator]") {
  const double m = 1.0, omega = 1.0, q0 = 1.0, t = 0.9;
  const auto modes = single_mode(m, omega);
  const GridState psi0 = ground_state(default_axis(), m, omega, q0);
  const GridState psi = evolve_wavefunction(modes, {}, psi0, t, 1.0);
  CHECK(first_moment(psi) == Catch::Approx(q0 * std::cos(omega * t)).margin(1e-6));
}

TEST_CASE("norm is conserved through repeated evolution", "[propagator]") {
  const auto modes = single_mode(1.0, 1.0);
  GridState psi = ground_state(default_axis(), 1.0, 1.0);
  for (int step = 0; step < 4; ++step) psi = evolve_wavefunction(modes, {}, psi, 0.35, 1.0);
  CHECK(psi.norm() == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("two-step evolution equals the single step", "[propagator]") {
  const auto modes = single_mode(1.0, 1.0);
  const GridState psi0 = ground_state(default_axis(), 1.0, 1.0, 0.8);
  const GridState two = evolve_wavefunction(
      modes, {}, evolve_wavefunction(modes, {}, psi0, 0.4, 1.0), 0.35, 1.0);
  const GridState one = evolve_wavefunction(modes, {}, psi0, 0.75, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < one.values.size(); ++i)
    worst = std::max(worst, std::abs(one.values[i] - two.values[i]));
  CHECK(worst < 1e-5);
}

TEST_CASE("driven mode shifts the wavepacket by the classical response", "[propagator]") {
  const double m = 1.0, omega = 1.0, f0 = 0.3, t = 1.2;
  QuadraticHamiltonian H = QuadraticHamiltonian::isotropic_oscillator(1, m, omega);
  H.mu = VectorTimeDep::constant(Eigen::VectorXd::Constant(1, f0));
  const auto path = propagate_path(H, t, 1e-3);

  const auto modes = single_mode(m, omega);
  const GridState psi0 = ground_state(default_axis(), m, omega);
  const GridState psi = evolve_wavefunction(modes, path.responses, psi0, t, 1.0);
  const double eta = f0 * (1.0 - std::cos(omega * t)) / (m * omega * omega);
  CHECK(first_moment(psi) == Catch::Approx(eta).margin(1e-6));
  CHECK(psi.norm() == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("two-mode evolution matches a direct double quadrature", "[propagator]") {
  // factorized per-axis contraction vs the brute-force 2-D trapezoid sum
  ModeDecomposition modes;
  modes.z = (Eigen::VectorXd(2) << 1.0, 2.25).finished();
  modes.V = Eigen::MatrixXd::Identity(2, 2);
  modes.omega = (Eigen::VectorXd(2) << 1.0, 1.5).finished();
  modes.mass = 1.0;
  const double t = 0.7, hbar = 1.0;

  const GridAxis axis{-5.0, 5.0, 48};
  const GridState psi0 = gaussian_state(
      {axis, axis}, (Eigen::VectorXd(2) << 0.4, -0.2).finished(),
      (Eigen::VectorXd(2) << std::sqrt(0.5), std::sqrt(1.0 / 3.0)).finished(),
      Eigen::VectorXd::Zero(2), hbar);
  // loose norm bound; this resolution is for route comparison only
  const GridState fast = evolve_wavefunction(modes, {}, psi0, t, hbar, 0.2);

  const ModeKernels k = make_mode_kernels(modes, t, hbar);
  auto kern = [&](int mode, double q, double qp) {
    const std::complex<double> amp(std::sqrt(std::abs(k.g[mode]) / (2.0 * kPi * hbar)));
    const double phase =
        (0.5 * (q * q + qp * qp) * k.f[mode] - q * qp * k.g[mode]) / hbar - kPi / 4.0;
    return amp * std::exp(std::complex<double>(0.0, phase));
  };
  const double dq = axis.spacing();
  auto weight = [&](int j) { return (j == 0 || j == axis.count - 1) ? 0.5 * dq : dq; };

  double worst = 0.0;
  for (int i0 : {7, 23, 31}) {
    for (int i1 : {11, 24, 40}) {
      std::complex<double> direct = 0.0;
      for (int j0 = 0; j0 < axis.count; ++j0)
        for (int j1 = 0; j1 < axis.count; ++j1)
          direct += kern(0, axis.coord(i0), axis.coord(j0)) *
                    kern(1, axis.coord(i1), axis.coord(j1)) * weight(j0) * weight(j1) *
                    psi0.values[static_cast<std::size_t>(j0) * axis.count + j1];
      worst = std::max(worst,
                       std::abs(direct - fast.values[static_cast<std::size_t>(i0) * axis.count + i1]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("coarse grids are refused", "[propagator]") {
  const auto modes = single_mode(1.0, 1.0);
  const GridState psi0 = ground_state({-8.0, 8.0, 24}, 1.0, 1.0);
  CHECK_THROWS_AS(evolve_wavefunction(modes, {}, psi0, 0.1, 1.0), GridResolutionError);
}

TEST_CASE("caustics stop grid evolution", "[propagator]") {
  const auto modes = single_mode(1.0, 1.0);
  const GridState psi0 = ground_state(default_axis(), 1.0, 1.0);
  CHECK_THROWS_AS(evolve_wavefunction(modes, {}, psi0, kPi, 1.0), CausticError);
}

TEST_CASE("matrix kernel equals the normal-mode product for a driven chain", "[propagator]") {
  // same kernel through two routes: the assembled 2n x 2n blocks, and the
  // per-mode f/g factorization in normal coordinates
  const double t = 0.8, hbar = 1.0, f0 = 0.4;
  ChainSpec spec{3, 1.0, 1.0, Boundary::Dirichlet, {}};
  spec.force = VectorTimeDep::constant((Eigen::VectorXd(3) << f0, 0.0, 0.0).finished());
  const QuadraticHamiltonian H = chain_hamiltonian(spec, hbar);
  const ModeDecomposition modes = decompose(build_Z(spec), spec.mass);

  const PropagationResult matrix_route = propagate(H, t, 1e-3);
  const auto path = propagate_path(H, t, 1e-3);
  const ModeKernels mode_route = make_mode_kernels(modes, t, hbar, path.responses);

  std::mt19937 rng(53);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXd q(3), qp(3);
    for (int i = 0; i < 3; ++i) {
      q[i] = dist(rng);
      qp[i] = dist(rng);
    }
    const std::complex<double> direct = kernel_eval(matrix_route.params, q, qp);

    const Eigen::VectorXd qt = transform_coords(modes, q);
    const Eigen::VectorXd qpt = transform_coords(modes, qp);
    double log_amp = 0.0;
    double phase = -3.0 * kPi / 4.0 + mode_route.source_phase;
    for (int k = 0; k < 3; ++k) {
      log_amp += 0.5 * std::log(std::abs(mode_route.g[k]) / (2.0 * kPi * hbar));
      phase += (0.5 * (qt[k] * qt[k] + qpt[k] * qpt[k]) * mode_route.f[k] -
                qt[k] * qpt[k] * mode_route.g[k] + qt[k] * mode_route.zeta_n[k] +
                qpt[k] * mode_route.g[k] * mode_route.eta_n[k]) /
               hbar;
    }
    const std::complex<double> factored = std::exp(std::complex<double>(log_amp, phase));
    CHECK(std::abs(direct - factored) < 1e-10 * std::abs(direct));
  }
}

TEST_CASE("pure-state density evolution matches the wavefunction route", "[propagator]") {
  const double t = 1.2;
  const auto modes = single_mode(1.0, 1.0);
  const GridAxis axis{-6.0, 6.0, 256};
  const GridState psi0 = ground_state(axis, 1.0, 1.0, 0.6);

  GridState rho0 = GridState::zeros({axis, axis});
  for (int i = 0; i < axis.count; ++i)
    for (int j = 0; j < axis.count; ++j)
      rho0.values[static_cast<std::size_t>(i) * axis.count + j] =
          psi0.values[i] * std::conj(psi0.values[j]);

  const GridState rho = evolve_density(modes, {}, rho0, t, 1.0);
  const GridState psi = evolve_wavefunction(modes, {}, psi0, t, 1.0);

  double worst = 0.0;
  for (int i = 0; i < axis.count; i += 7)
    for (int j = 0; j < axis.count; j += 7)
      worst = std::max(worst,
                       std::abs(rho.values[static_cast<std::size_t>(i) * axis.count + j] -
                                psi.values[i] * std::conj(psi.values[j])));
  CHECK(worst < 1e-8);
  CHECK(std::abs(density_trace(rho) - 1.0) < 1e-6);
}

TEST_CASE("mixed two-component density keeps trace and hermiticity", "[propagator]") {
  const auto modes = single_mode(1.0, 1.0);
  const GridAxis axis{-6.0, 6.0, 256};
  const GridState a = ground_state(axis, 1.0, 1.0, 0.8);
  const GridState b = ground_state(axis, 1.0, 1.0, -0.8);

  GridState rho0 = GridState::zeros({axis, axis});
  for (int i = 0; i < axis.count; ++i)
    for (int j = 0; j < axis.count; ++j)
      rho0.values[static_cast<std::size_t>(i) * axis.count + j] =
          0.5 * (a.values[i] * std::conj(a.values[j]) + b.values[i] * std::conj(b.values[j]));

  const GridState rho = evolve_density(modes, {}, rho0, 1.2, 1.0);
  CHECK(std::abs(density_trace(rho) - 1.0) < 1e-6);
  double herm = 0.0;
  for (int i = 0; i < axis.count; i += 11)
    for (int j = 0; j < axis.count; j += 11)
      herm = std::max(herm,
                      std::abs(rho.values[static_cast<std::size_t>(i) * axis.count + j] -
                               std::conj(rho.values[static_cast<std::size_t>(j) * axis.count + i])));
  CHECK(herm < 1e-10);
}
