#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "rupture/cyclic_tridiagonal.hpp"
#include "rupture/errors.hpp"
#include "rupture/presets.hpp"
#include "rupture/solver.hpp"
#include "rupture/stationary.hpp"

using namespace rupture;

namespace {

constexpr double kPi = std::numbers::pi;

ModelConfig unforced(Mode mode = Mode::decoupled) {
  ModelConfig m = preset("ex1");
  m.mode = mode;
  m.jump_strengths = {0.0, 0.0, 0.0};
  m.forcing_offset = 0.0;
  return m;
}

Eigen::MatrixXd implicit_matrix(const Operators& ops, double dt) {
  const auto n = static_cast<Eigen::Index>(ops.grid.n);
  return Eigen::MatrixXd::Identity(n, n) * (1.0 / dt + ops.alpha) +
         ops.sigma * Eigen::MatrixXd(ops.stiffness);
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return u(rng); });
}

}  // namespace

TEST_CASE("grid construction") {
  ModelConfig m = preset("ex1");
  const Grid g = build_grid(m, 10);
  CHECK(g.dx() == doctest::Approx(0.1));
  for (std::size_t j = 0; j < 10; ++j) CHECK(g.node(j) == doctest::Approx(0.1 * j));
  m.omega = 2.0;
  m.junctions = {0.2, 1.2, 1.8};
  CHECK(build_grid(m, 8).dx() == 0.25);
  CHECK_THROWS_AS(build_grid(m, 3), SizeError);
  const Eigen::VectorXd x = build_grid(m, 64).nodes();
  for (Eigen::Index j = 1; j < x.size(); ++j) CHECK(x(j) > x(j - 1));
  CHECK(x(x.size() - 1) < 2.0);
}

TEST_CASE("delta load uses the P1 hat functions") {
  const Grid g{10, 1.0};
  const std::vector<double> on_node{0.3};
  const std::vector<double> mid{0.35};
  const std::vector<double> c{2.0};
  Eigen::VectorXd F = delta_load(g, on_node, c, 0.0);
  CHECK(F(3) == doctest::Approx(2.0 / 0.1));
  CHECK(F.sum() - F(3) == doctest::Approx(0.0));

  F = delta_load(g, mid, c, 0.0);
  CHECK(F(3) == doctest::Approx(1.0 / 0.1));
  CHECK(F(4) == doctest::Approx(1.0 / 0.1));

  const std::vector<double> wrap{0.95};
  F = delta_load(g, wrap, c, 0.5);
  CHECK(F(9) == doctest::Approx(1.0 / 0.1 - 0.5));
  CHECK(F(0) == doctest::Approx(1.0 / 0.1 - 0.5));
}

TEST_CASE("delta load preserves the total strength") {
  const ModelConfig m = preset("ex1");
  const Operators ops = assemble_operators(build_grid(m, 512), m);
  const double dx = ops.grid.dx();
  const double total = ((ops.load.array() + m.forcing_offset) * dx).sum();
  CHECK(std::abs(total - 3.0) <= 1e-12 * 3.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g{static_cast<std::size_t>(8 + trial * 7), 1.0 + u(rng)};
    const std::vector<double> a{u(rng) * g.omega};
    const std::vector<double> c{1.0};
    const Eigen::VectorXd F = delta_load(g, a, c, 0.0);
    CHECK(std::abs(F.sum() * g.dx() - 1.0) <= 1e-12);
  }
}

TEST_CASE("effective load of the two reductions") {
  ModelConfig m = preset("ex1");
  m.tau = 2.0;
  m.sigma2 = 0.5;
  const Grid g = build_grid(m, 64);
  const Eigen::VectorXd raw = delta_load(g, m.junctions, m.jump_strengths, m.forcing_offset);
  Operators ops = assemble_operators(g, m);
  CHECK((ops.load - raw / 2.0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(ops.sigma == 0.5);
  m.reduction_case = ReductionCase::case_ii;
  m.sigma1 = 4.0;
  ops = assemble_operators(g, m);
  CHECK((ops.load - raw * (0.5 / 4.0)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("implicit matrix is an M-matrix") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig m = preset("ex1");
    m.sigma2 = 1e-3 + u(rng) * 10.0;
    m.alpha = 1e-3 + u(rng) * 100.0;
    const Operators ops = assemble_operators(build_grid(m, 32), m);
    const Eigen::MatrixXd A = implicit_matrix(ops, 1e-5 + u(rng));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      CHECK(A(i, i) > 0.0);
      double off = 0.0;
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        if (j == i) continue;
        CHECK(A(i, j) <= 0.0);
        off += std::abs(A(i, j));
      }
      CHECK(A(i, i) > off);
    }
  }
}

TEST_CASE("cyclic tridiagonal solve matches a dense solve") {
  std::mt19937_64 rng(4);
  for (Eigen::Index n : {3, 4, 7, 50, 257}) {
    Eigen::VectorXd lower = random_vector(rng, n, -1.0, 0.0);
    Eigen::VectorXd upper = random_vector(rng, n, -1.0, 0.0);
    Eigen::VectorXd diag = random_vector(rng, n, 2.5, 4.0);
    const CyclicTridiagonal<double> T(lower, diag, upper);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dense(i, i) += diag(i);
      dense(i, (i + n - 1) % n) += lower(i);
      dense(i, (i + 1) % n) += upper(i);
    }
    const Eigen::VectorXd b = random_vector(rng, n, -1.0, 1.0);
    const Eigen::VectorXd x = T.solve(b);
    CHECK((x - dense.lu().solve(b)).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((T.apply(x) - b).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  const CyclicTridiagonal<float> Tf = CyclicTridiagonal<float>::constant(16, -1.0f, 3.0f);
  const Eigen::VectorXf bf = Eigen::VectorXf::Ones(16);
  CHECK((Tf.solve(bf).array() - 1.0f).abs().maxCoeff() <= 1e-5f);
}

TEST_CASE("discrete stationary state is a fixed point of the step") {
  const ModelConfig m = preset("ex1");
  const Operators ops = assemble_operators(build_grid(m, 256), m);
  const auto n = static_cast<Eigen::Index>(ops.grid.n);
  const Eigen::MatrixXd L = ops.sigma * Eigen::MatrixXd(ops.stiffness) +
                            ops.alpha * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd star = L.lu().solve(ops.load);
  const Field next = step_decoupled({ops.grid, star, 0.0}, 1e-3, ops);
  CHECK((next.values - star).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(next.time == 1e-3);
}

TEST_CASE("constant mode decays by 1 / (1 + alpha dt)") {
  const ModelConfig m = unforced();
  const Operators ops = assemble_operators(build_grid(m, 64), m);
  const Field next = step_decoupled({ops.grid, Eigen::VectorXd::Ones(64), 0.0}, 0.1, ops);
  CHECK((next.values.array() - 1.0 / 1.1).abs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(step_decoupled({ops.grid, Eigen::VectorXd::Ones(64), 0.0}, 0.0, ops), DomainError);
}

TEST_CASE("step preserves nodal order") {
  const ModelConfig m = preset("ex2");
  const Operators ops = assemble_operators(build_grid(m, 128), m);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd lo = random_vector(rng, 128, -1.0, 1.0);
    const Eigen::VectorXd hi = lo + random_vector(rng, 128, 0.0, 1e-3);
    const Field a = step_decoupled({ops.grid, hi, 0.0}, 1e-3, ops);
    const Field b = step_decoupled({ops.grid, lo, 0.0}, 1e-3, ops);
    CHECK((a.values - b.values).minCoeff() >= -1e-12);
  }
}

TEST_CASE("coupled step with zero forcing") {
  const ModelConfig m = unforced(Mode::coupled);
  const Operators ops = assemble_operators(build_grid(m, 64), m);
  const auto [h, zeta] = step_coupled({ops.grid, Eigen::VectorXd::Zero(64), 0.0},
                                      {ops.grid, Eigen::VectorXd::Ones(64), 0.0}, 0.1, ops);
  CHECK(h.values.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((zeta.values.array() - 1.0 / 1.1).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("coupled step equals the decoupled step when sigma1 / tau = sigma2") {
  ModelConfig c = preset("ex3");
  c.sigma1 = 1.0;
  ModelConfig d = c;
  d.mode = Mode::decoupled;
  const Grid g = build_grid(c, 256);
  const Operators oc = assemble_operators(g, c);
  const Operators od = assemble_operators(g, d);
  std::mt19937_64 rng(12);
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    const Eigen::VectorXd h = random_vector(rng, 256, -1.0, 1.0);
    const Eigen::VectorXd eta = random_vector(rng, 256, 0.0, 1.0);
    const auto [h1, z1] = step_coupled({g, h, 0.0}, {g, h + eta, 0.0}, dt, oc);
    const Field e1 = step_decoupled({g, eta, 0.0}, dt, od);
    CHECK((z1.values - h1.values - e1.values).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((z1.values - h1.values - e1.values).lpNorm<Eigen::Infinity>() <= 10.0 * dt);
  }
}

TEST_CASE("h is conserved for the mass-conserving offset") {
  const ModelConfig m = preset("ex3");
  const Operators ops = assemble_operators(build_grid(m, 512), m);
  std::mt19937_64 rng(13);
  Field h{ops.grid, random_vector(rng, 512, -1.0, 1.0), 0.0};
  Field zeta{ops.grid, h.values.array() + 0.05, 0.0};
  const double dx = ops.grid.dx();
  for (int s = 0; s < 100; ++s) {
    const double before = h.values.sum() * dx;
    std::tie(h, zeta) = step_coupled(h, zeta, 1e-3, ops);
    CHECK(std::abs(h.values.sum() * dx - before) <= 1e-10);
  }
}

TEST_CASE("evolve") {
  const ModelConfig m = preset("ex1");
  const Operators ops = assemble_operators(build_grid(m, 128), m);
  const State s0 = State::decoupled({ops.grid, Eigen::VectorXd::Constant(128, 0.03), 0.0});

  const State same = evolve(s0, 0.0, 1e-3, ops);
  CHECK(same.eta == s0.eta);
  CHECK(same.time == 0.0);

  const State twice = evolve(evolve(s0, 1e-3, 1e-3, ops), 2e-3, 1e-3, ops);
  const State once = evolve(s0, 2e-3, 1e-3, ops);
  CHECK((twice.eta - once.eta).lpNorm<Eigen::Infinity>() <= 1e-15);

  const State partial = evolve(s0, 2.5e-3, 1e-3, ops);
  State manual = step(step(step(s0, 1e-3, ops), 1e-3, ops), 0.5e-3, ops);
  CHECK((partial.eta - manual.eta).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK(partial.time == 2.5e-3);

  const ModelConfig u = unforced();
  const Operators uo = assemble_operators(build_grid(u, 16), u);
  const State decayed =
      evolve(State::decoupled({uo.grid, Eigen::VectorXd::Ones(16), 0.0}), 1.0, 1e-3, uo);
  CHECK(std::abs(decayed.eta(3) - std::exp(-1.0)) <= 1e-3);
  CHECK_THROWS_AS(evolve(partial, 1e-3, 1e-3, ops), DomainError);
}

TEST_CASE("discrete average law") {
  const ModelConfig m = preset("ex1");
  const Operators ops = assemble_operators(build_grid(m, 256), m);
  const double dt = 1e-3;
  std::mt19937_64 rng(17);
  State s = State::decoupled({ops.grid, random_vector(rng, 256, 0.0, 1.0), 0.0});
  for (int n = 0; n < 200; ++n) {
    const double before = lumped_mean(s.eta);
    s = step(s, dt, ops);
    const double after = lumped_mean(s.eta);
    CHECK(std::abs(after * (1.0 + m.alpha * dt) - before) <= 1e-12 * std::abs(before));
  }
}

TEST_CASE("rotating data and junctions by one node commutes with stepping") {
  ModelConfig m = preset("ex1");
  const Grid g = build_grid(m, 200);
  ModelConfig r = m;
  for (double& a : r.junctions) a = std::fmod(a + g.dx(), m.omega);
  const Operators om = assemble_operators(g, m);
  const Operators orr = assemble_operators(g, r);
  std::mt19937_64 rng(21);
  const Eigen::VectorXd eta = random_vector(rng, 200, 0.0, 1.0);
  Eigen::VectorXd rotated(200);
  for (Eigen::Index j = 0; j < 200; ++j) rotated((j + 1) % 200) = eta(j);
  const Field a = step_decoupled({g, eta, 0.0}, 1e-3, om);
  const Field b = step_decoupled({g, rotated, 0.0}, 1e-3, orr);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < 200; ++j) worst = std::max(worst, std::abs(b.values((j + 1) % 200) - a.values(j)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("Fourier reference solution") {
  const ModelConfig m = preset("ex1");
  const Grid g = build_grid(m, 256);
  const StationaryProfile s = solve_stationary(m);
  const Eigen::VectorXd x = g.nodes();
  const Eigen::VectorXd sn = sample(s, x);

  const Field still = fourier_reference(m, {g, sn, 0.0}, 0.7);
  CHECK((still.values - sn).lpNorm<Eigen::Infinity>() <= 1e-10);

  const Eigen::VectorXd mode = (2.0 * kPi * x.array()).cos().matrix();
  for (double t : {0.0, 0.013, 0.1, 1.0}) {
    const Field f = fourier_reference(m, {g, sn + mode, 0.0}, t);
    const double decay = std::exp(-(m.sigma2 * 4.0 * kPi * kPi + m.alpha) * t);
    CHECK((f.values - sn - decay * mode).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(f.time == t);
  }

  std::mt19937_64 rng(23);
  const Eigen::VectorXd any = random_vector(rng, 256, -1.0, 1.0);
  CHECK((fourier_reference(m, {g, any, 0.0}, 0.0).values - any).lpNorm<Eigen::Infinity>() <= 1e-10);

  CHECK_THROWS_AS(fourier_reference(preset("ex3"), {g, sn, 0.0}, 0.1), UnsupportedError);
  ModelConfig z = m;
  z.alpha = 0.0;
  CHECK_THROWS_AS(fourier_reference(z, {g, sn, 0.0}, 0.1), UnsupportedError);
}

TEST_CASE("backward Euler converges to the Fourier reference at first order") {
  const ModelConfig m = preset("ex1");
  const Grid g = build_grid(m, 512);
  const Operators ops = assemble_operators(g, m);
  const Eigen::VectorXd x = g.nodes();
  const Eigen::VectorXd eta0 =
      sample(solve_stationary(m), x) + (2.0 * kPi * x.array()).cos().matrix();
  const Field ref = fourier_reference(m, {g, eta0, 0.0}, 0.1);
  std::vector<double> err;
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    const State out = evolve(State::decoupled({g, eta0, 0.0}), 0.1, dt, ops);
    err.push_back((out.eta - ref.values).lpNorm<Eigen::Infinity>());
    CHECK(err.back() <= 5.0 * dt);
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log2(err[i - 1] / err[i]);
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
  }
}
