#pragma once

#include <stdexcept>
#include <string>

namespace qprop {

/// Thrown when an operation requires inverting B_t at a focal point of the
/// classical flow (det B_t ~ 0), or when a normal mode sits at sin(w t) ~ 0.
class CausticError : public std::runtime_error {
 public:
  explicit CausticError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a grid-based quadrature cannot hold its accuracy contract
/// (e.g. norm drift beyond the configured bound).
class GridResolutionError : public std::runtime_error {
 public:
  explicit GridResolutionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qprop
