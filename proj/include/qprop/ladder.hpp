#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "qprop/time_dep.hpp"

namespace qprop {

/// Chain of n identical oscillators with nearest-neighbour hopping g in the
/// ladder-operator picture. The optional drive R(t) acts on site 1 as
/// hbar R(t) (a_1 + a_1^dag); R is the scaled force -F(t)/sqrt(2 m hbar w).
struct LadderChain {
  int n = 1;
  double omega0 = 1.0;
  double g = 0.0;
  std::optional<std::complex<double>> alpha;  // coherent amplitude on site 1 at t=0
  std::optional<ScalarTimeDep> drive;
};

/// Tridiagonal coefficient matrix: diagonal hbar w0, off-diagonal hbar g.
Eigen::MatrixXd build_lambda(const LadderChain& chain, double hbar = 1.0);

/// Analytic spectrum lambda_k = w0 + 2g cos(k pi/(n+1)) and eigenvectors
/// V(j,k) = sqrt(2/(n+1)) sin((k+1)(j+1) pi/(n+1)) (columns, k = 0..n-1
/// for modes 1..n).
struct LadderModes {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd V;
};
LadderModes ladder_modes(const LadderChain& chain);

/// (exp(-i t Lambda / hbar))_{ij} via the spectral sum; sites are 1-based.
std::complex<double> transition_amplitude(const LadderChain& chain, double t, int i, int j);

/// P_ij(t) = |(exp(-i t Lambda/hbar))_{ij}|^2; independent of hbar.
double transition_probability(const LadderChain& chain, double t, int i, int j);

/// P_{n1}(t) in the alternating-sign closed form.
double end_to_end(const LadderChain& chain, double t);

/// Mean occupation per site for an initial coherent state alpha on site 1:
/// <n_j>(t) = |alpha|^2 P_{j1}(t).
Eigen::VectorXd coherent_excitations(const LadderChain& chain, double t);

/// Occupation ratio <n_j>(t) / <n_1>(0) = P_{1j}(t), independent of the
/// initial state of site 1.
double excitation_ratio(const LadderChain& chain, double t, int j);

/// Site-resolved probabilities P(site, tau) for a single excitation
/// injected at source_site, on a grid of scaled times tau = g t.
struct TransitionMap {
  std::vector<double> taus;
  std::vector<int> sites;  // 1-based, contiguous
  Eigen::MatrixXd P;       // P(site index, tau index)
  int source_site = 1;
};
TransitionMap excitation_map(const LadderChain& chain, const std::vector<double>& taus,
                             int site_min, int site_max, int threads = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Smallest tau where P(site, .) has a three-point local maximum above the
/// 1e-3 floor, for every site of the map, plus a least-squares line over
/// (site, tau*).
struct FirstMaxima {
  std::vector<int> sites;
  std::vector<double> tau_star;
  LinearFit fit;
};
FirstMaxima first_maxima(const TransitionMap& map);

/// Response of the vacuum chain to the drive: per-mode accumulated
/// amplitudes R~_j(t) = \int_0^t R(t') exp(i lambda_j t') dt' and the mean
/// site occupations of the resulting product of coherent states.
struct ForcedResponse {
  Eigen::VectorXcd rtilde;
  Eigen::VectorXd occupations;
};
ForcedResponse forced_response(const LadderChain& chain, double t, double step = 1e-3);

/// Labeled initial state for the brute-force oracle; non-vacuum content
/// always sits on site 1.
struct FockState {
  enum class Kind { Vacuum, Fock, Coherent };
  Kind kind = Kind::Vacuum;
  int quanta = 0;
  std::complex<double> alpha;

  static FockState vacuum() { return {}; }
  static FockState fock(int k) { return {Kind::Fock, k, {}}; }
  static FockState coherent(std::complex<double> a) { return {Kind::Coherent, 0, a}; }
};

/// Dense evolution in the truncated product Fock basis (cutoff levels per
/// site); verification oracle only. Throws when probability leaks onto the
/// top level of any site beyond 1e-6.
struct FockOracleResult {
  Eigen::VectorXd occupations;
  double leakage = 0.0;
};
FockOracleResult fock_oracle(const LadderChain& chain, double t, int cutoff,
                             const FockState& initial, double rk4_step = 1e-3);

}  // namespace qprop
