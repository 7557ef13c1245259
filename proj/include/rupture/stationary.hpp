#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rupture/config.hpp"

namespace rupture {

enum class Side { left, right };

/// Closed-form time-independent solution s of the decoupled equation.
///
/// For alpha > 0 the profile on interval k is stored in a locally scaled form
///
///   s(a_k + u) = offset + P_k exp(-lambda (L_k - u)) + Q_k exp(-lambda u),
///
/// for u in [0, L_k], so that both exponentials stay in (0, 1] whatever the
/// size of lambda * L_k. For alpha == 0 the coefficients are (beta_k, gamma_k)
/// of the quadratic  quad * u^2 + beta_k u + gamma_k  with quad = A / (2 sigma).
struct StationaryProfile {
  double omega = 1.0;
  std::vector<double> junctions;
  std::vector<double> lengths;
  double sigma = 1.0;
  double alpha = 0.0;
  double forcing_offset = 0.0;
  double lambda = 0.0;
  double offset = 0.0;
  bool alpha_zero = false;
  Eigen::MatrixX2d coeffs;

  std::size_t num_intervals() const { return junctions.size(); }

  double value(double x, Side side = Side::right) const;
  double slope(double x, Side side = Side::right) const;
  double curvature(double x, Side side = Side::right) const;

  /// Value and derivatives at local coordinate u of interval k.
  double local_value(std::size_t k, double u) const;
  double local_slope(std::size_t k, double u) const;
  double local_curvature(std::size_t k, double u) const;

  /// (b+, b-) of s = offset + b+ e^{lambda x} + b- e^{-lambda x} on interval k.
  /// May overflow for large lambda * omega; prefer the local form.
  Eigen::Vector2d global_coefficients(std::size_t k) const;
};

StationaryProfile solve_stationary(const ModelConfig& config);
StationaryProfile solve_stationary_alpha0(const ModelConfig& config);

/// Dispatches on alpha.
StationaryProfile stationary_profile(const ModelConfig& config);

inline double eval_stationary(const StationaryProfile& profile, double x) {
  return profile.value(x);
}

/// Samples s at the given positions.
Eigen::VectorXd sample(const StationaryProfile& profile, const Eigen::VectorXd& xs);

struct IntervalExtrema {
  std::size_t k;
  double min;
  double max;
};

struct SReport {
  std::optional<std::size_t> rupture_interval_index;
  std::vector<IntervalExtrema> per_interval;
  /// Interval holding the global minimum of s (candidate when (S) fails).
  std::size_t lowest_interval = 0;
  bool condition_S_holds = false;
  /// s < eta_a on the closure of the distinguished (or lowest) interval.
  bool eta_a_clearance = false;
  /// Exactly one interval reaches eta_c; s > eta_c on its complement.
  bool localized = false;
  /// min s < eta_c strictly inside the distinguished interval.
  bool min_below_eta_c = false;
  std::vector<std::string> messages;
};

/// Extrema are found in closed form on each closed interval.
SReport check_condition_S(const StationaryProfile& profile, const ModelConfig& config);

namespace detail {
/// Continuity and jump conditions for the alpha > 0 coefficients, in the
/// unknown order (P_0, Q_0, P_1, Q_1, ...).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> stationary_system(const StationaryProfile& shape,
                                                              std::span<const double> jumps);
}  // namespace detail

}  // namespace rupture
