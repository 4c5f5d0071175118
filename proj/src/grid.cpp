#include "qprop/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qprop {

std::size_t GridState::size() const {
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.count);
  return total;
}

double GridState::volume_element() const {
  double dv = 1.0;
  for (const auto& a : axes) dv *= a.spacing();
  return dv;
}

double GridState::norm() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return std::sqrt(acc * volume_element());
}

void GridState::scale(std::complex<double> factor) {
  for (auto& v : values) v *= factor;
}

GridState GridState::zeros(std::vector<GridAxis> axes) {
  GridState s;
  for (const auto& a : axes)
    if (a.count < 2) throw std::invalid_argument("grid axis needs count >= 2");
  s.axes = std::move(axes);
  s.values.assign(s.size(), {0.0, 0.0});
  return s;
}

GridState gaussian_state(const std::vector<GridAxis>& axes, const Eigen::VectorXd& center,
                         const Eigen::VectorXd& width, const Eigen::VectorXd& momentum,
                         double hbar) {
  const int n = static_cast<int>(axes.size());
  if (center.size() != n || width.size() != n || momentum.size() != n)
    throw std::invalid_argument("gaussian_state: parameter dimension mismatch");
  for (int k = 0; k < n; ++k)
    if (!(width[k] > 0.0)) throw std::invalid_argument("gaussian width must be positive");

  GridState state = GridState::zeros(axes);
  // Per-axis factors, then an outer product walk over the flattened grid.
  std::vector<std::vector<std::complex<double>>> factors(n);
  for (int k = 0; k < n; ++k) {
    factors[k].resize(axes[k].count);
    for (int i = 0; i < axes[k].count; ++i) {
      const double q = axes[k].coord(i);
      const double dq = q - center[k];
      factors[k][i] = std::exp(std::complex<double>(-dq * dq / (4.0 * width[k] * width[k]),
                                                    momentum[k] * q / hbar));
    }
  }
  std::vector<int> idx(n, 0);
  for (std::size_t flat = 0; flat < state.values.size(); ++flat) {
    std::complex<double> v = 1.0;
    for (int k = 0; k < n; ++k) v *= factors[k][idx[k]];
    state.values[flat] = v;
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[k] < axes[k].count) break;
      idx[k] = 0;
    }
  }
  const double nrm = state.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("gaussian_state: zero norm on grid");
  state.scale(1.0 / nrm);
  return state;
}

void contract_axis(GridState& state, int axis, const Eigen::MatrixXcd& M) {
  const int rank = static_cast<int>(state.axes.size());
  if (axis < 0 || axis >= rank) throw std::invalid_argument("contract_axis: axis out of range");
  const int count = state.axes[axis].count;
  if (M.rows() != count || M.cols() != count)
    throw std::invalid_argument("contract_axis: matrix does not match axis length");

  std::size_t inner = 1;  // stride of the contracted axis
  for (int k = axis + 1; k < rank; ++k) inner *= static_cast<std::size_t>(state.axes[k].count);
  std::size_t outer = 1;
  for (int k = 0; k < axis; ++k) outer *= static_cast<std::size_t>(state.axes[k].count);

  std::vector<std::complex<double>> out(state.values.size());
  Eigen::VectorXcd slice(count), res(count);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * static_cast<std::size_t>(count) * inner;
    for (std::size_t in = 0; in < inner; ++in) {
      for (int j = 0; j < count; ++j)
        slice[j] = state.values[base + static_cast<std::size_t>(j) * inner + in];
      res.noalias() = M * slice;
      for (int i = 0; i < count; ++i)
        out[base + static_cast<std::size_t>(i) * inner + in] = res[i];
    }
  }
  state.values = std::move(out);
}

}  // namespace qprop
