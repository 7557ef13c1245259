#include "rupture/solver.hpp"

#include <cmath>
#include <limits>

#include "rupture/cyclic_tridiagonal.hpp"
#include "rupture/errors.hpp"
#include "rupture/intervals.hpp"

namespace rupture {

namespace {

using System = CyclicTridiagonal<double>;

// (1/dt + reaction) I + diffusivity * S
System implicit_system(const Grid& grid, double dt, double diffusivity, double reaction) {
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  return System::constant(static_cast<Eigen::Index>(grid.n), -diffusivity * inv_dx2,
                          1.0 / dt + reaction + 2.0 * diffusivity * inv_dx2);
}

Eigen::VectorXd checked_solve(const System& system, const Eigen::VectorXd& rhs) {
  Eigen::VectorXd x = system.solve(rhs);
  const double residual = (system.apply(x) - rhs).lpNorm<Eigen::Infinity>();
  // Backward-error allowance on top of the relative bound, for systems whose
  // diagonal dwarfs the right-hand side.
  const double matrix_norm = std::abs(system.diag()(0)) + 2.0 * std::abs(system.lower()(0));
  const double allowed = 1e-12 * rhs.lpNorm<Eigen::Infinity>() +
                         64.0 * std::numeric_limits<double>::epsilon() * matrix_norm *
                             x.lpNorm<Eigen::Infinity>();
  if (!(residual <= allowed) || !x.allFinite())
    throw SolverError("implicit step: linear solve residual exceeds tolerance");
  return x;
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
}

}  // namespace

Eigen::VectorXd Grid::nodes() const {
  return Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(n),
                                      [this](Eigen::Index j) { return node(static_cast<std::size_t>(j)); });
}

Grid build_grid(const ModelConfig& config, std::size_t n) {
  if (n < 4) throw SizeError("grid needs at least 4 nodes");
  return Grid{n, config.omega};
}

Eigen::VectorXd delta_load(const Grid& grid, std::span<const double> junctions,
                           std::span<const double> strengths, double offset) {
  const auto n = static_cast<Eigen::Index>(grid.n);
  const double dx = grid.dx();
  Eigen::VectorXd load = Eigen::VectorXd::Constant(n, -offset);
  for (std::size_t k = 0; k < junctions.size(); ++k) {
    const double t = wrap_periodic(junctions[k], grid.omega) / dx;
    auto j = static_cast<Eigen::Index>(std::floor(t));
    const double theta = t - static_cast<double>(j);
    j %= n;
    // Hat functions of the two nodes bracketing a_k.
    load(j) += strengths[k] * (1.0 - theta) / dx;
    load((j + 1) % n) += strengths[k] * theta / dx;
  }
  return load;
}

Operators assemble_operators(const Grid& grid, const ModelConfig& config) {
  Operators ops;
  ops.grid = grid;
  ops.mode = config.mode;
  ops.alpha = config.alpha;
  ops.tau = config.tau;
  ops.h_diffusivity = config.sigma1 / config.tau;

  const Eigen::VectorXd raw =
      delta_load(grid, config.junctions, config.jump_strengths, config.forcing_offset);
  if (config.mode == Mode::decoupled) {
    const EffectiveEquation eq = effective_equation(config);
    ops.sigma = eq.sigma;
    ops.forcing_scale = eq.forcing_scale;
    ops.load = eq.forcing_scale * raw;
  } else {
    ops.sigma = config.sigma2;
    ops.forcing_scale = 1.0;
    ops.load = raw;
  }

  const auto n = static_cast<Eigen::Index>(grid.n);
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    entries.emplace_back(j, j, 2.0 * inv_dx2);
    entries.emplace_back(j, (j + 1) % n, -inv_dx2);
    entries.emplace_back(j, (j + n - 1) % n, -inv_dx2);
  }
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(entries.begin(), entries.end());

  ops.node_interval.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    ops.node_interval[j] = locate_interval(config.junctions, config.omega, grid.node(j)).index;
  return ops;
}

Field step_decoupled(const Field& state, double dt, const Operators& ops) {
  require_positive_dt(dt);
  const System system = implicit_system(ops.grid, dt, ops.sigma, ops.alpha);
  const Eigen::VectorXd rhs = state.values / dt + ops.load;
  return {state.grid, checked_solve(system, rhs), state.time + dt};
}

std::pair<Field, Field> step_coupled(const Field& h, const Field& zeta, double dt,
                                     const Operators& ops) {
  require_positive_dt(dt);
  const System h_system = implicit_system(ops.grid, dt, ops.h_diffusivity, 0.0);
  Eigen::VectorXd h_next = checked_solve(h_system, h.values / dt - ops.load / ops.tau);

  const System zeta_system = implicit_system(ops.grid, dt, ops.sigma, ops.alpha);
  Eigen::VectorXd zeta_next = checked_solve(zeta_system, zeta.values / dt + ops.alpha * h_next);

  return {Field{h.grid, std::move(h_next), h.time + dt},
          Field{zeta.grid, std::move(zeta_next), zeta.time + dt}};
}

State State::decoupled(const Field& eta) { return State{eta.time, eta.values, {}, {}}; }

State State::coupled(const Field& eta) {
  return State{eta.time, eta.values, Eigen::VectorXd::Zero(eta.values.size()), eta.values};
}

State State::coupled(const Field& h, const Field& zeta) {
  return State{h.time, zeta.values - h.values, h.values, zeta.values};
}

State step(const State& state, double dt, const Operators& ops) {
  if (ops.mode == Mode::decoupled) {
    Field next = step_decoupled({ops.grid, state.eta, state.time}, dt, ops);
    return State{next.time, std::move(next.values), {}, {}};
  }
  if (!state.coupled()) throw DomainError("coupled operators need a coupled state");
  auto [h, zeta] = step_coupled({ops.grid, state.h, state.time},
                                {ops.grid, state.zeta, state.time}, dt, ops);
  State next{h.time, zeta.values - h.values, std::move(h.values), std::move(zeta.values)};
  return next;
}

State evolve(State state, double t_end, double dt, const Operators& ops) {
  require_positive_dt(dt);
  if (t_end < state.time) throw DomainError("evolve: t_end precedes the current time");
  for (double h = detail::next_step(state.time, t_end, dt); h > 0.0;
       h = detail::next_step(state.time, t_end, dt))
    state = step(state, h, ops);
  state.time = t_end;
  return state;
}

}  // namespace rupture
