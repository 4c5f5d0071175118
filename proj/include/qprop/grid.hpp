#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace qprop {

/// Uniform 1-D grid with count >= 2 points including both endpoints.
struct GridAxis {
  double min = -1.0;
  double max = 1.0;
  int count = 2;

  double spacing() const { return (max - min) / (count - 1); }
  double coord(int i) const { return min + spacing() * i; }
};

/// Complex amplitudes sampled on a product of uniform axes, row-major with
/// the last axis fastest.
struct GridState {
  std::vector<GridAxis> axes;
  std::vector<std::complex<double>> values;

  std::size_t size() const;
  double volume_element() const;  // product of axis spacings
  double norm() const;            // sqrt(sum |psi|^2 * dV)
  void scale(std::complex<double> factor);

  static GridState zeros(std::vector<GridAxis> axes);
};

/// Normalized Gaussian product state
///   prod_k exp(-(q_k - c_k)^2 / (4 w_k^2) + i p_k q_k / hbar)
/// with position spread w_k, discretized and renormalized on the grid.
GridState gaussian_state(const std::vector<GridAxis>& axes, const Eigen::VectorXd& center,
                         const Eigen::VectorXd& width, const Eigen::VectorXd& momentum,
                         double hbar);

/// out[..., i, ...] = sum_j M(i, j) in[..., j, ...] along the given axis.
void contract_axis(GridState& state, int axis, const Eigen::MatrixXcd& M);

}  // namespace qprop
