#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rupture/config.hpp"
#include "rupture/rupture.hpp"
#include "rupture/solver.hpp"
#include "rupture/stationary.hpp"

namespace rupture {

struct PoincareResult {
  Field profile;  // eta(., t_r - 0)
  double rupture_time = 0.0;
  std::vector<std::size_t> reset_intervals;
};

/// Rupture-to-rupture return map of the decoupled equation.
///
/// A profile xi is spliced (eta_a inside the distinguished interval
/// (a_i, a_{i+1}), xi outside), evolved to its first rupture, and mapped to
/// the pre-rupture profile. The distinguished interval comes from condition
/// (S); when (S) does not localize the rupture, the interval holding the
/// lowest stationary value is used and violations surface as
/// ModelViolationError.
class ReturnMap {
 public:
  ReturnMap(const ModelConfig& config, const StationaryProfile& profile);

  std::size_t distinguished_interval() const { return interval_; }
  /// B of the admissible set s <= xi <= s + B, chosen as eta_a - inf(s) + 1.
  double bound() const { return bound_; }
  const SReport& s_report() const { return report_; }
  const Operators& operators() const { return ops_; }
  const Eigen::VectorXd& stationary_nodes() const { return s_nodes_; }
  /// True at nodes strictly inside (a_i, a_{i+1}).
  const std::vector<bool>& inside() const { return inside_; }

  Field splice(const Field& xi) const;

  /// Throws ModelViolationError if the rupture resets anything other than
  /// the distinguished interval.
  PoincareResult operator()(const Field& xi) const;

  /// Sup norm of a - b over nodes outside (a_i, a_{i+1}).
  double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// s <= xi <= s + B at every node outside (a_i, a_{i+1}).
  bool in_admissible_set(const Eigen::VectorXd& xi, double slack = 0.0) const;

 private:
  ModelConfig config_;
  Operators ops_;
  SReport report_;
  std::size_t interval_ = 0;
  double bound_ = 0.0;
  Eigen::VectorXd s_nodes_;
  std::vector<bool> inside_;
};

PoincareResult poincare_map(const Field& xi, const ModelConfig& config,
                            const StationaryProfile& profile);

struct IterateRecord {
  std::size_t m = 0;
  double t_r = 0.0;
  double sup_diff = 0.0;
  std::vector<std::size_t> reset_intervals;
  bool input_in_set = false;
  bool output_in_set = false;
};

struct ConvergenceReport {
  std::vector<IterateRecord> iterates;
  bool converged = false;
  double period = 0.0;
  Field fixed_profile;
  std::optional<std::size_t> distinguished_interval;
  /// Pre-rupture profile produced by each iterate.
  std::vector<Field> profiles;
  /// Post-rupture profile following each iterate (the spliced profile in
  /// decoupled mode).
  std::vector<Field> post_profiles;
  std::vector<std::string> messages;
};

/// Picard iteration of the return map from xi0 until sup_diff <= fp_tol or
/// max_iter iterates. In coupled mode there is no splicing: consecutive
/// pre-rupture eta profiles of one rupture-punctuated run are compared over
/// the whole grid.
ConvergenceReport find_periodic(const ModelConfig& config, const Field& xi0, double fp_tol,
                                std::size_t max_iter);

/// Independent find_periodic runs, one per initial profile, in parallel.
/// Results keep the order of `starts`; the first failure is rethrown.
std::vector<ConvergenceReport> find_periodic_sweep(const ModelConfig& config,
                                                   std::span<const Field> starts, double fp_tol,
                                                   std::size_t max_iter);

struct PeriodicityCheck {
  bool periodic = false;
  double first_gap = 0.0;
  double second_gap = 0.0;
  /// |pre_1 - fixed| and |pre_2 - pre_1| in the return-map norm.
  double first_diff = 0.0;
  double second_diff = 0.0;
};

/// Runs two further periods from the (spliced) fixed profile. Periodic iff the
/// two periods agree within 2 dt and each pre-rupture profile matches its
/// predecessor within tol.
PeriodicityCheck check_periodic(const ModelConfig& config, const Field& fixed_profile, double tol);

inline bool verify_periodic(const ModelConfig& config, const Field& fixed_profile, double tol) {
  return check_periodic(config, fixed_profile, tol).periodic;
}

struct GradientSample {
  double t = 0.0;
  double sup_gradient = 0.0;
  double bound = 0.0;
};

struct GradientProbe {
  std::vector<GradientSample> samples;
  /// Smallest (c0, c1) >= 0, in the sense of the summed bound over the probe
  /// times, with sup|d_x eta(t)| <= c0 |eta0|_inf / sqrt(t) + c1 sum|c_k|.
  double c0 = 0.0;
  double c1 = 0.0;
};

/// sup |d_x eta| at nodes: centered differences, one-sided at the two nodes
/// bracketing each junction.
double sup_gradient(const Field& eta, std::span<const double> junctions);

GradientProbe gradient_probe(const ModelConfig& config, const Field& eta0,
                             std::span<const double> times);

}  // namespace rupture
