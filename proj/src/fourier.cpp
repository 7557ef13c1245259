#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rupture/errors.hpp"
#include "rupture/solver.hpp"
#include "rupture/stationary.hpp"

namespace rupture {

Field fourier_reference(const ModelConfig& config, const Field& eta0, double t) {
  if (config.mode != Mode::decoupled)
    throw UnsupportedError("fourier_reference: decoupled mode only");
  if (!(config.alpha > 0.0)) throw UnsupportedError("fourier_reference: requires alpha > 0");

  const EffectiveEquation eq = effective_equation(config);
  const StationaryProfile s = solve_stationary(config);
  const Grid& grid = eta0.grid;
  const std::size_t n = grid.n;
  const Eigen::VectorXd s_nodes = sample(s, grid.nodes());

  std::vector<double> deviation(n);
  Eigen::Map<Eigen::VectorXd>(deviation.data(), static_cast<Eigen::Index>(n)) =
      eta0.values - s_nodes;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, deviation);

  const double two_pi_over_omega = 2.0 * std::numbers::pi / grid.omega;
  for (std::size_t m = 0; m < n; ++m) {
    const double wavenumber =
        two_pi_over_omega *
        (m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n));
    spectrum[m] *= std::exp(-(eq.sigma * wavenumber * wavenumber + eq.alpha) * t);
  }

  std::vector<double> decayed;
  fft.inv(decayed, spectrum);
  Field out{grid, s_nodes, eta0.time + t};
  out.values += Eigen::Map<const Eigen::VectorXd>(decayed.data(), static_cast<Eigen::Index>(n));
  return out;
}

}  // namespace rupture
