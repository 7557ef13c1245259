#include "rupture/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <tuple>
#include <sstream>

#include "rupture/errors.hpp"
#include "rupture/intervals.hpp"

namespace rupture {

namespace {

std::string describe(std::span<const std::size_t> intervals) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < intervals.size(); ++i) os << (i ? ", " : "") << intervals[i];
  os << '}';
  return os.str();
}

}  // namespace

ReturnMap::ReturnMap(const ModelConfig& config, const StationaryProfile& profile)
    : config_(config),
      ops_(assemble_operators(build_grid(config, config.numerics.grid_points), config)),
      report_(check_condition_S(profile, config)) {
  if (config.mode != Mode::decoupled) throw UnsupportedError("return map: decoupled mode only");
  interval_ = report_.rupture_interval_index.value_or(report_.lowest_interval);

  s_nodes_ = sample(profile, ops_.grid.nodes());
  bound_ = config.eta_a - s_nodes_.minCoeff() + 1.0;

  inside_.resize(ops_.grid.n);
  for (std::size_t j = 0; j < ops_.grid.n; ++j) {
    const auto loc = locate_interval(config.junctions, config.omega, ops_.grid.node(j));
    inside_[j] = loc.index == interval_ && loc.offset > 0.0;
  }
}

Field ReturnMap::splice(const Field& xi) const {
  Field out{ops_.grid, xi.values, 0.0};
  for (std::size_t j = 0; j < inside_.size(); ++j)
    if (inside_[j]) out.values(static_cast<Eigen::Index>(j)) = config_.eta_a;
  return out;
}

PoincareResult ReturnMap::operator()(const Field& xi) const {
  RuptureRun run = run_with_rupture(config_, ops_, State::decoupled(splice(xi)),
                                    StopCriterion{.max_events = 1, .t_end = std::nullopt});
  RuptureEvent& event = run.events.front();
  if (event.reset_intervals.size() != 1 || event.reset_intervals.front() != interval_) {
    throw ModelViolationError("rupture reset intervals " + describe(event.reset_intervals) +
                              " outside the distinguished interval " +
                              std::to_string(interval_));
  }
  return {event.pre.eta_field(ops_.grid), event.time, event.reset_intervals};
}

double ReturnMap::sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  double out = 0.0;
  for (std::size_t j = 0; j < inside_.size(); ++j) {
    if (inside_[j]) continue;
    const auto i = static_cast<Eigen::Index>(j);
    out = std::max(out, std::abs(a(i) - b(i)));
  }
  return out;
}

bool ReturnMap::in_admissible_set(const Eigen::VectorXd& xi, double slack) const {
  for (std::size_t j = 0; j < inside_.size(); ++j) {
    if (inside_[j]) continue;
    const auto i = static_cast<Eigen::Index>(j);
    if (xi(i) < s_nodes_(i) - slack || xi(i) > s_nodes_(i) + bound_ + slack) return false;
  }
  return true;
}

PoincareResult poincare_map(const Field& xi, const ModelConfig& config,
                            const StationaryProfile& profile) {
  return ReturnMap(config, profile)(xi);
}

namespace {

ConvergenceReport find_periodic_coupled(const ModelConfig& config, const Field& xi0,
                                        double fp_tol, std::size_t max_iter) {
  const Operators ops = assemble_operators(xi0.grid, config);
  ConvergenceReport report;
  report.messages.emplace_back("coupled mode: consecutive pre-rupture eta profiles compared");

  State state = State::coupled(Field{xi0.grid, xi0.values, 0.0});
  Eigen::VectorXd previous = xi0.values;
  for (std::size_t m = 1; m <= max_iter; ++m) {
    const double start = state.time;
    RuptureRun run = run_with_rupture(config, ops, std::move(state),
                                      StopCriterion{.max_events = 1, .t_end = std::nullopt});
    RuptureEvent& event = run.events.front();
    IterateRecord rec;
    rec.m = m;
    rec.t_r = event.time - start;
    rec.sup_diff = (event.pre.eta - previous).lpNorm<Eigen::Infinity>();
    rec.reset_intervals = event.reset_intervals;
    report.iterates.push_back(rec);
    report.profiles.push_back(event.pre.eta_field(ops.grid));
    report.post_profiles.push_back(event.post.eta_field(ops.grid));
    previous = event.pre.eta;
    state = std::move(run.final_state);
    if (rec.sup_diff <= fp_tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.iterates.empty()) {
    report.period = report.iterates.back().t_r;
    report.fixed_profile = report.profiles.back();
  }
  return report;
}

}  // namespace

ConvergenceReport find_periodic(const ModelConfig& config, const Field& xi0, double fp_tol,
                                std::size_t max_iter) {
  if (config.mode == Mode::coupled) return find_periodic_coupled(config, xi0, fp_tol, max_iter);

  if (!validate(config).condition_C_holds)
    throw DomainError("find_periodic: condition (C) does not hold");
  const StationaryProfile profile = solve_stationary(config);
  const ReturnMap map(config, profile);

  ConvergenceReport report;
  report.distinguished_interval = map.distinguished_interval();
  report.messages = map.s_report().messages;
  if (!map.s_report().condition_S_holds)
    report.messages.emplace_back("condition (S) does not hold; iterating with interval " +
                                 std::to_string(map.distinguished_interval()));

  Field xi{map.operators().grid, xi0.values, 0.0};
  for (std::size_t m = 1; m <= max_iter; ++m) {
    PoincareResult next;
    try {
      next = map(xi);
    } catch (const ModelViolationError& e) {
      throw ModelViolationError("iterate " + std::to_string(m) + ": " + e.what());
    }
    IterateRecord rec;
    rec.m = m;
    rec.t_r = next.rupture_time;
    rec.sup_diff = map.sup_diff(next.profile.values, xi.values);
    rec.reset_intervals = next.reset_intervals;
    rec.input_in_set = map.in_admissible_set(xi.values);
    rec.output_in_set = map.in_admissible_set(next.profile.values);
    report.iterates.push_back(rec);
    report.profiles.push_back(next.profile);
    report.post_profiles.push_back(map.splice(next.profile));
    xi = Field{next.profile.grid, next.profile.values, 0.0};
    if (rec.sup_diff <= fp_tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.iterates.empty()) {
    report.period = report.iterates.back().t_r;
    report.fixed_profile = report.profiles.back();
  }
  return report;
}

std::vector<ConvergenceReport> find_periodic_sweep(const ModelConfig& config,
                                                   std::span<const Field> starts, double fp_tol,
                                                   std::size_t max_iter) {
  std::vector<std::future<ConvergenceReport>> jobs;
  jobs.reserve(starts.size());
  for (const Field& xi0 : starts)
    jobs.push_back(std::async(std::launch::async, [&config, &xi0, fp_tol, max_iter] {
      return find_periodic(config, xi0, fp_tol, max_iter);
    }));
  std::vector<ConvergenceReport> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

PeriodicityCheck check_periodic(const ModelConfig& config, const Field& fixed_profile, double tol) {
  PeriodicityCheck out;
  const double dt = config.numerics.dt;

  if (config.mode == Mode::decoupled) {
    const ReturnMap map(config, solve_stationary(config));
    const PoincareResult first = map(fixed_profile);
    const PoincareResult second = map(first.profile);
    out.first_gap = first.rupture_time;
    out.second_gap = second.rupture_time;
    out.first_diff = map.sup_diff(first.profile.values, fixed_profile.values);
    out.second_diff = map.sup_diff(second.profile.values, first.profile.values);
  } else {
    const Operators ops = assemble_operators(fixed_profile.grid, config);
    const RuptureRun run =
        run_with_rupture(config, ops, State::coupled(Field{fixed_profile.grid, fixed_profile.values, 0.0}),
                         StopCriterion{.max_events = 2, .t_end = std::nullopt});
    out.first_gap = run.events[0].time;
    out.second_gap = run.events[1].time - run.events[0].time;
    out.first_diff = (run.events[0].pre.eta - fixed_profile.values).lpNorm<Eigen::Infinity>();
    out.second_diff = (run.events[1].pre.eta - run.events[0].pre.eta).lpNorm<Eigen::Infinity>();
  }
  out.periodic = std::abs(out.first_gap - out.second_gap) <= 2.0 * dt &&
                 out.first_diff <= tol && out.second_diff <= tol;
  return out;
}

double sup_gradient(const Field& eta, std::span<const double> junctions) {
  const auto n = static_cast<Eigen::Index>(eta.grid.n);
  const double dx = eta.grid.dx();
  const Eigen::VectorXd& v = eta.values;
  auto at = [&](Eigen::Index j) { return v(((j % n) + n) % n); };

  // -1: backward difference, +1: forward difference, 0: centered.
  std::vector<int> kind(static_cast<std::size_t>(n), 0);
  for (double a : junctions) {
    auto j = static_cast<Eigen::Index>(std::floor(wrap_periodic(a, eta.grid.omega) / dx)) % n;
    kind[static_cast<std::size_t>(j)] = -1;
    kind[static_cast<std::size_t>((j + 1) % n)] = 1;
  }

  double out = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double g = 0.0;
    switch (kind[static_cast<std::size_t>(j)]) {
      case -1: g = (at(j) - at(j - 1)) / dx; break;
      case 1: g = (at(j + 1) - at(j)) / dx; break;
      default: g = (at(j + 1) - at(j - 1)) / (2.0 * dx); break;
    }
    out = std::max(out, std::abs(g));
  }
  return out;
}

namespace {

// min sum_t (c0 a_t + c1 b) subject to c0 a_t + c1 b >= g_t, c0, c1 >= 0.
// Two variables: the optimum sits on a vertex of the feasible region.
std::pair<double, double> fit_bound_constants(const std::vector<double>& a, double b,
                                              const std::vector<double>& g) {
  const double g_max = *std::max_element(g.begin(), g.end());
  if (g_max <= 0.0) return {0.0, 0.0};

  std::vector<std::pair<double, double>> candidates;
  if (b > 0.0) candidates.emplace_back(0.0, g_max / b);
  {
    double c0 = 0.0;
    bool ok = true;
    for (std::size_t t = 0; t < a.size(); ++t) {
      if (a[t] > 0.0)
        c0 = std::max(c0, g[t] / a[t]);
      else if (g[t] > 0.0)
        ok = false;
    }
    if (ok) candidates.emplace_back(c0, 0.0);
  }
  if (b > 0.0) {
    for (std::size_t t = 0; t < a.size(); ++t) {
      for (std::size_t u = t + 1; u < a.size(); ++u) {
        if (a[t] == a[u]) continue;
        const double c0 = (g[t] - g[u]) / (a[t] - a[u]);
        const double c1 = (g[t] - c0 * a[t]) / b;
        if (c0 >= 0.0 && c1 >= 0.0) candidates.emplace_back(c0, c1);
      }
    }
  }

  const double a_sum = std::accumulate(a.begin(), a.end(), 0.0);
  const double b_sum = b * static_cast<double>(a.size());
  std::pair<double, double> best{std::numeric_limits<double>::infinity(), 0.0};
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto [c0, c1] : candidates) {
    bool feasible = true;
    for (std::size_t t = 0; t < a.size(); ++t) {
      const double slack = 1e-12 * std::max(1.0, std::abs(g[t]));
      if (c0 * a[t] + c1 * b < g[t] - slack) feasible = false;
    }
    const double cost = c0 * a_sum + c1 * b_sum;
    if (feasible && cost < best_cost) {
      best_cost = cost;
      best = {c0, c1};
    }
  }
  return best;
}

}  // namespace

GradientProbe gradient_probe(const ModelConfig& config, const Field& eta0,
                             std::span<const double> times) {
  if (config.mode != Mode::decoupled) throw UnsupportedError("gradient_probe: decoupled only");
  if (times.empty()) throw DomainError("gradient_probe: no probe times");

  const Operators ops = assemble_operators(eta0.grid, config);
  const EffectiveEquation eq = effective_equation(config);
  double jump_total = 0.0;
  for (double c : eq.jump_strengths) jump_total += std::abs(c);
  const double eta0_sup = eta0.values.lpNorm<Eigen::Infinity>();

  GradientProbe probe;
  std::vector<double> a;
  std::vector<double> g;
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("gradient_probe: probe times must be positive");
    const double dt = std::min(config.numerics.dt, t / 10.0);
    const State end = evolve(State::decoupled(Field{eta0.grid, eta0.values, 0.0}), t, dt, ops);
    GradientSample sample;
    sample.t = t;
    sample.sup_gradient = sup_gradient(end.eta_field(eta0.grid), config.junctions);
    probe.samples.push_back(sample);
    a.push_back(eta0_sup / std::sqrt(t));
    g.push_back(sample.sup_gradient);
  }

  std::tie(probe.c0, probe.c1) = fit_bound_constants(a, jump_total, g);
  for (std::size_t i = 0; i < probe.samples.size(); ++i)
    probe.samples[i].bound = probe.c0 * a[i] + probe.c1 * jump_total;
  return probe;
}

}  // namespace rupture
