#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rupture/config.hpp"

namespace rupture {

/// Uniform periodic grid x_j = j * omega / n, j = 0..n-1.
struct Grid {
  std::size_t n = 0;
  double omega = 1.0;

  double dx() const { return omega / static_cast<double>(n); }
  double node(std::size_t j) const {
    return static_cast<double>(j) * omega / static_cast<double>(n);
  }
  Eigen::VectorXd nodes() const;

  bool operator==(const Grid&) const = default;
};

Grid build_grid(const ModelConfig& config, std::size_t n);

/// Nodal samples of one periodic function at one time.
struct Field {
  Grid grid;
  Eigen::VectorXd values;
  double time = 0.0;
};

/// Discrete operators of the P1 / lumped-mass scheme.
struct Operators {
  Grid grid;
  Mode mode = Mode::decoupled;
  /// Diffusivity of eta (decoupled) or of zeta (coupled).
  double sigma = 1.0;
  double alpha = 0.0;
  /// sigma1 / tau, the diffusivity of h (coupled only).
  double h_diffusivity = 1.0;
  double tau = 1.0;
  /// F_j = sum_k c_k phi_j(a_k) / dx - A; scaled by the reduction factor in
  /// decoupled mode, raw in coupled mode.
  Eigen::VectorXd load;
  /// Cyclic (-1, 2, -1) / dx^2.
  Eigen::SparseMatrix<double> stiffness;
  /// Interval index of each node under the half-open convention.
  std::vector<std::size_t> node_interval;
  /// Raw forcing-to-load ratio (1 in coupled mode).
  double forcing_scale = 1.0;
};

/// Nodal P1 load of sum_k c_k delta(x - a_k) - A divided by the lumped mass.
Eigen::VectorXd delta_load(const Grid& grid, std::span<const double> junctions,
                           std::span<const double> strengths, double offset);

Operators assemble_operators(const Grid& grid, const ModelConfig& config);

/// Solves (I/dt + sigma S + alpha I) eta' = eta/dt + F.
Field step_decoupled(const Field& state, double dt, const Operators& ops);

/// h first: (I/dt + (sigma1/tau) S) h' = h/dt - F/tau,
/// then zeta: (I/dt + sigma2 S + alpha I) zeta' = zeta/dt + alpha h'.
std::pair<Field, Field> step_coupled(const Field& h, const Field& zeta, double dt,
                                     const Operators& ops);

/// Simulation state. In coupled mode h and zeta are primary and eta = zeta - h.
struct State {
  double time = 0.0;
  Eigen::VectorXd eta;
  Eigen::VectorXd h;
  Eigen::VectorXd zeta;

  bool coupled() const { return h.size() > 0; }
  Field eta_field(const Grid& grid) const { return {grid, eta, time}; }

  static State decoupled(const Field& eta);
  /// Starts from a flat interface h = 0 and zeta = eta.
  static State coupled(const Field& eta);
  static State coupled(const Field& h, const Field& zeta);
};

/// One implicit step in whichever mode `ops` was assembled for.
State step(const State& state, double dt, const Operators& ops);

/// Steps of size dt up to t_end; the last step is shortened to land on t_end.
State evolve(State state, double t_end, double dt, const Operators& ops);

/// Mild solution of the decoupled equation by Fourier decay of eta0 - s
/// around the closed-form stationary profile s, truncated at |m| <= n/2.
Field fourier_reference(const ModelConfig& config, const Field& eta0, double t);

namespace detail {
/// Size of the next step towards t_end, or 0 once t_end is reached. Full
/// steps of dt are taken until less than one step remains.
inline double next_step(double time, double t_end, double dt) {
  const double remaining = t_end - time;
  if (remaining <= 1e-12 * dt) return 0.0;
  return remaining < dt * (1.0 - 1e-12) ? remaining : dt;
}
}  // namespace detail

/// Lumped average (1/omega) sum_j v_j dx.
inline double lumped_mean(const Eigen::VectorXd& v) { return v.mean(); }

}  // namespace rupture
