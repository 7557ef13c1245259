#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rupture/config.hpp"
#include "rupture/solver.hpp"

namespace rupture {

/// Analytic bounds on the first rupture time of the decoupled equation.
///
///   lower:  (1/alpha) log[(A/alpha + inf eta0) / (A/alpha + eta_c)]
///           from the spatially constant subsolution
///           xi(t) = A (e^{-alpha t} - 1) / alpha + inf(eta0) e^{-alpha t};
///   upper:  -(1/alpha) log(eta_c / mean(eta0))
///           from the decay of the mean when the integral of f is <= 0.
struct BoundsReport {
  double t_lower = 0.0;
  double t_upper = 0.0;
  bool lower_applicable = false;
  bool upper_applicable = false;
};

/// inf and mean are taken over nodal values. Uses the effective (reduced)
/// forcing. Throws DomainError for alpha <= 0.
BoundsReport rupture_time_bounds(const ModelConfig& config, const Field& eta0);

struct Crossing {
  double step = 0.0;  // located sub-step from `pre`, in (0, dt]
  State state;        // state at pre.time + step
};

/// Bisects the sub-step size in (0, dt] until |min eta - eta_c| <= event_tol *
/// eta_a or the bracket is narrower than 1e-3 dt. The returned state always has
/// min eta <= eta_c + event_tol * eta_a. Throws BracketError unless
/// min(pre) > eta_c >= min(step(pre, dt)).
Crossing locate_crossing(const State& pre, double dt, const Operators& ops,
                         const ModelConfig& config);

/// Nodes with eta <= eta_c + event_tol * eta_a.
std::vector<std::size_t> rupture_nodes(const Eigen::VectorXd& eta, const ModelConfig& config);

/// Sorted interval indices whose half-open span [a_k, a_{k+1}) holds a rupture
/// node. Throws EmptyRuptureSetError when no node qualifies.
std::vector<std::size_t> rupture_intervals(const Field& at_rupture, const ModelConfig& config);

/// eta := eta_a on every node of the listed intervals. In coupled mode h also
/// drops by d there and zeta := h + eta.
State apply_reset(State state, std::span<const std::size_t> intervals, const Operators& ops,
                  const ModelConfig& config);

struct RuptureEvent {
  std::size_t index = 0;  // 1-based event counter j
  double time = 0.0;
  std::vector<std::size_t> rupture_nodes;
  std::vector<std::size_t> reset_intervals;
  State pre;   // at t_j - 0
  State post;  // at t_j + 0

  double min_eta() const { return pre.eta.minCoeff(); }
};

struct StopCriterion {
  std::optional<std::size_t> max_events;
  std::optional<double> t_end;
};

struct RuptureRun {
  std::vector<RuptureEvent> events;
  State final_state;
};

/// Evolves with threshold-triggered resets until the stop criterion is met.
/// Throws StagnationError if two consecutive events are less than one time
/// step apart.
RuptureRun run_with_rupture(const ModelConfig& config, const Operators& ops, State initial,
                            const StopCriterion& stop);

}  // namespace rupture
