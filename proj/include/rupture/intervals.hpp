#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace rupture {

/// Reduces x modulo omega into [0, omega).
inline double wrap_periodic(double x, double omega) {
  double r = x - omega * std::floor(x / omega);
  return r >= omega ? 0.0 : r;
}

/// Position of a point relative to the bubble intervals [a_k, a_{k+1}).
struct IntervalLocation {
  std::size_t index;  // k, with the last interval wrapping through omega
  double offset;      // x - a_k, in [0, length of interval k)
};

/// Half-open convention: a point sitting exactly on a_k belongs to interval k.
IntervalLocation locate_interval(std::span<const double> junctions, double omega, double x);

}  // namespace rupture
