#pragma once

#include <Eigen/Dense>
#include <random>

namespace qprop::test {

inline Eigen::MatrixXd random_matrix(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = dist(rng);
  return M;
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng, double scale = 1.0) {
  const Eigen::MatrixXd M = random_matrix(n, rng, scale);
  return 0.5 * (M + M.transpose());
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace qprop::test
