#include "rupture/intervals.hpp"

#include <algorithm>

namespace rupture {

IntervalLocation locate_interval(std::span<const double> junctions, double omega, double x) {
  const double xr = wrap_periodic(x, omega);
  const auto it = std::upper_bound(junctions.begin(), junctions.end(), xr);
  if (it == junctions.begin()) {
    const std::size_t last = junctions.size() - 1;
    return {last, xr + omega - junctions[last]};
  }
  const auto k = static_cast<std::size_t>(std::distance(junctions.begin(), it) - 1);
  return {k, xr - junctions[k]};
}

}  // namespace rupture
