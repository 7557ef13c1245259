#include "rupture/rupture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rupture/errors.hpp"
#include "rupture/intervals.hpp"

namespace rupture {

BoundsReport rupture_time_bounds(const ModelConfig& config, const Field& eta0) {
  if (!(config.alpha > 0.0)) throw DomainError("rupture time bounds need alpha > 0");
  const EffectiveEquation eq = effective_equation(config);
  const double alpha = eq.alpha;
  const double A = eq.forcing_offset;
  const double inf0 = eta0.values.minCoeff();
  const double mean0 = lumped_mean(eta0.values);

  BoundsReport r;
  const double shift = A / alpha;
  r.t_lower = std::log((shift + inf0) / (shift + config.eta_c)) / alpha;
  r.t_upper = -std::log(config.eta_c / mean0) / alpha;

  const bool nonneg_c = std::all_of(eq.jump_strengths.begin(), eq.jump_strengths.end(),
                                    [](double c) { return c >= 0.0; });
  r.lower_applicable = nonneg_c && A >= 0.0 && inf0 > config.eta_c;

  const double sum_c = std::accumulate(eq.jump_strengths.begin(), eq.jump_strengths.end(), 0.0);
  const double integral_f = sum_c - A * config.omega;
  r.upper_applicable = integral_f <= 0.0 && mean0 > config.eta_c;
  return r;
}

Crossing locate_crossing(const State& pre, double dt, const Operators& ops,
                         const ModelConfig& config) {
  const double tol = config.numerics.event_tol * config.eta_a;
  auto gap = [&](const State& s) { return s.eta.minCoeff() - config.eta_c; };

  if (!(gap(pre) > 0.0)) throw BracketError("locate_crossing: state is already at the threshold");
  State hi_state = step(pre, dt, ops);
  if (gap(hi_state) > 0.0) throw BracketError("locate_crossing: no crossing within the step");
  if (std::abs(gap(hi_state)) <= tol) return {dt, std::move(hi_state)};

  double lo = 0.0;
  double hi = dt;
  while (hi - lo >= 1e-3 * dt) {
    const double mid = 0.5 * (lo + hi);
    State trial = step(pre, mid, ops);
    const double g = gap(trial);
    if (std::abs(g) <= tol) return {mid, std::move(trial)};
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
      hi_state = std::move(trial);
    }
  }
  return {hi, std::move(hi_state)};
}

std::vector<std::size_t> rupture_nodes(const Eigen::VectorXd& eta, const ModelConfig& config) {
  const double level = config.eta_c + config.numerics.event_tol * config.eta_a;
  std::vector<std::size_t> nodes;
  for (Eigen::Index j = 0; j < eta.size(); ++j)
    if (eta(j) <= level) nodes.push_back(static_cast<std::size_t>(j));
  return nodes;
}

std::vector<std::size_t> rupture_intervals(const Field& at_rupture, const ModelConfig& config) {
  const auto nodes = rupture_nodes(at_rupture.values, config);
  if (nodes.empty()) throw EmptyRuptureSetError("no node at or below the rupture threshold");
  std::vector<std::size_t> out;
  for (std::size_t j : nodes)
    out.push_back(locate_interval(config.junctions, config.omega, at_rupture.grid.node(j)).index);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

State apply_reset(State state, std::span<const std::size_t> intervals, const Operators& ops,
                  const ModelConfig& config) {
  std::vector<bool> reset(config.num_junctions(), false);
  for (std::size_t k : intervals) reset.at(k) = true;

  for (std::size_t j = 0; j < ops.grid.n; ++j) {
    if (!reset[ops.node_interval[j]]) continue;
    const auto i = static_cast<Eigen::Index>(j);
    state.eta(i) = config.eta_a;
    if (state.coupled()) {
      state.h(i) -= config.d;
      state.zeta(i) = state.h(i) + config.eta_a;
    }
  }
  return state;
}

RuptureRun run_with_rupture(const ModelConfig& config, const Operators& ops, State initial,
                            const StopCriterion& stop) {
  if (!(initial.eta.minCoeff() > config.eta_c))
    throw DomainError("initial thickness must exceed eta_c everywhere");
  if (!stop.max_events && !stop.t_end)
    throw DomainError("run_with_rupture needs max_events or t_end");

  const double dt = config.numerics.dt;
  RuptureRun run;
  State state = std::move(initial);

  while (true) {
    if (stop.max_events && run.events.size() >= *stop.max_events) break;
    double h = dt;
    if (stop.t_end) {
      h = detail::next_step(state.time, *stop.t_end, dt);
      if (h == 0.0) {
        state.time = *stop.t_end;
        break;
      }
    }

    State trial = step(state, h, ops);
    if (trial.eta.minCoeff() > config.eta_c) {
      state = std::move(trial);
      continue;
    }

    Crossing crossing = locate_crossing(state, h, ops, config);
    RuptureEvent event;
    event.index = run.events.size() + 1;
    event.time = crossing.state.time;
    event.rupture_nodes = rupture_nodes(crossing.state.eta, config);
    event.reset_intervals = rupture_intervals(crossing.state.eta_field(ops.grid), config);
    if (!run.events.empty() && event.time - run.events.back().time < dt) {
      std::ostringstream os;
      os << "ruptures at t = " << run.events.back().time << " and t = " << event.time
         << " are less than one time step apart";
      throw StagnationError(os.str());
    }
    event.pre = std::move(crossing.state);
    event.post = apply_reset(event.pre, event.reset_intervals, ops, config);
    state = event.post;
    run.events.push_back(std::move(event));
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace rupture
