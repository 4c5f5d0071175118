#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qprop {

/// Composite Simpson rule over uniformly spaced samples. The sample count
/// must be odd (an even number of intervals of width h).
template <class T>
T simpson(const std::vector<T>& samples, double h) {
  const std::size_t m = samples.size();
  if (m < 3 || m % 2 == 0)
    throw std::invalid_argument("simpson: need an odd number of samples >= 3");
  T acc = samples.front() + samples.back();
  for (std::size_t j = 1; j + 1 < m; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * samples[j];
  return (h / 3.0) * acc;
}

/// Number of uniform intervals covering [0, t] with spacing <= max_step,
/// rounded up to a multiple of `multiple`.
inline std::size_t interval_count(double t, double max_step, std::size_t multiple) {
  if (!(max_step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  std::size_t n = static_cast<std::size_t>(t / max_step);
  while (static_cast<double>(n) * max_step < t) ++n;
  if (n == 0) n = 1;
  const std::size_t rem = n % multiple;
  if (rem != 0) n += multiple - rem;
  return n;
}

}  // namespace qprop
