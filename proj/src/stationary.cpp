#include "rupture/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rupture/errors.hpp"
#include "rupture/intervals.hpp"

namespace rupture {

namespace {

StationaryProfile profile_shape(const ModelConfig& config, const EffectiveEquation& eq) {
  StationaryProfile p;
  p.omega = config.omega;
  p.junctions = config.junctions;
  p.lengths.resize(config.num_junctions());
  for (std::size_t k = 0; k < p.lengths.size(); ++k) p.lengths[k] = config.interval_length(k);
  p.sigma = eq.sigma;
  p.alpha = eq.alpha;
  p.forcing_offset = eq.forcing_offset;
  p.coeffs = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(p.lengths.size()), 2);
  return p;
}

// Extremum candidates of the local profile on [0, L].
std::vector<double> critical_points(const StationaryProfile& p, std::size_t k) {
  const double L = p.lengths[k];
  std::vector<double> us = {0.0, L};
  const auto row = static_cast<Eigen::Index>(k);
  if (p.alpha_zero) {
    const double quad = p.forcing_offset / (2.0 * p.sigma);
    if (quad != 0.0) us.push_back(-p.coeffs(row, 0) / (2.0 * quad));
  } else {
    const double P = p.coeffs(row, 0);
    const double Q = p.coeffs(row, 1);
    if (P != 0.0 && Q / P > 0.0) us.push_back(0.5 * (L + std::log(Q / P) / p.lambda));
  }
  std::erase_if(us, [L](double u) { return !(u >= 0.0 && u <= L); });
  return us;
}

}  // namespace

double StationaryProfile::local_value(std::size_t k, double u) const {
  const auto row = static_cast<Eigen::Index>(k);
  if (alpha_zero) {
    const double quad = forcing_offset / (2.0 * sigma);
    return (quad * u + coeffs(row, 0)) * u + coeffs(row, 1);
  }
  return offset + coeffs(row, 0) * std::exp(-lambda * (lengths[k] - u)) +
         coeffs(row, 1) * std::exp(-lambda * u);
}

double StationaryProfile::local_slope(std::size_t k, double u) const {
  const auto row = static_cast<Eigen::Index>(k);
  if (alpha_zero) return forcing_offset / sigma * u + coeffs(row, 0);
  return lambda * (coeffs(row, 0) * std::exp(-lambda * (lengths[k] - u)) -
                   coeffs(row, 1) * std::exp(-lambda * u));
}

double StationaryProfile::local_curvature(std::size_t k, double u) const {
  if (alpha_zero) return forcing_offset / sigma;
  return lambda * lambda * (local_value(k, u) - offset);
}

namespace {

template <typename Eval>
double evaluate_sided(const StationaryProfile& p, double x, Side side, Eval eval) {
  const auto loc = locate_interval(p.junctions, p.omega, x);
  if (side == Side::left && loc.offset == 0.0) {
    const std::size_t K = p.num_intervals();
    const std::size_t prev = (loc.index + K - 1) % K;
    return eval(prev, p.lengths[prev]);
  }
  return eval(loc.index, loc.offset);
}

}  // namespace

double StationaryProfile::value(double x, Side side) const {
  return evaluate_sided(*this, x, side,
                        [this](std::size_t k, double u) { return local_value(k, u); });
}

double StationaryProfile::slope(double x, Side side) const {
  return evaluate_sided(*this, x, side,
                        [this](std::size_t k, double u) { return local_slope(k, u); });
}

double StationaryProfile::curvature(double x, Side side) const {
  return evaluate_sided(*this, x, side,
                        [this](std::size_t k, double u) { return local_curvature(k, u); });
}

Eigen::Vector2d StationaryProfile::global_coefficients(std::size_t k) const {
  if (alpha_zero) throw UnsupportedError("alpha = 0 profile has no exponential coefficients");
  const auto row = static_cast<Eigen::Index>(k);
  const double a = junctions[k];
  return {coeffs(row, 0) * std::exp(-lambda * (a + lengths[k])),
          coeffs(row, 1) * std::exp(lambda * a)};
}

namespace detail {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> stationary_system(const StationaryProfile& shape,
                                                              std::span<const double> jumps) {
  const auto K = static_cast<Eigen::Index>(shape.num_intervals());
  const double lam = shape.lambda;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * K, 2 * K);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::Index n = (k + 1) % K;
    const double Ek = std::exp(-lam * shape.lengths[static_cast<std::size_t>(k)]);
    const double En = std::exp(-lam * shape.lengths[static_cast<std::size_t>(n)]);
    // s_k(L_k) = s_n(0)
    M(2 * k, 2 * k) += 1.0;
    M(2 * k, 2 * k + 1) += Ek;
    M(2 * k, 2 * n) -= En;
    M(2 * k, 2 * n + 1) -= 1.0;
    // s_n'(0) - s_k'(L_k) = -c_n / sigma
    M(2 * k + 1, 2 * n) += lam * En;
    M(2 * k + 1, 2 * n + 1) -= lam;
    M(2 * k + 1, 2 * k) -= lam;
    M(2 * k + 1, 2 * k + 1) += lam * Ek;
    rhs(2 * k + 1) = -jumps[static_cast<std::size_t>(n)] / shape.sigma;
  }
  return {std::move(M), std::move(rhs)};
}

}  // namespace detail

StationaryProfile solve_stationary(const ModelConfig& config) {
  if (config.mode != Mode::decoupled)
    throw UnsupportedError("stationary profile is defined for the decoupled equation only");
  if (config.alpha == 0.0) throw UnsupportedError("alpha = 0: use solve_stationary_alpha0");
  if (!(config.alpha > 0.0)) throw DomainError("alpha must be positive");

  const EffectiveEquation eq = effective_equation(config);
  StationaryProfile p = profile_shape(config, eq);
  p.lambda = std::sqrt(eq.alpha / eq.sigma);
  p.offset = -eq.forcing_offset / eq.alpha;

  auto [M, rhs] = detail::stationary_system(p, eq.jump_strengths);
  const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
  const double residual = (M * sol - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>())))
    throw SingularSystemError("stationary system residual too large");

  for (Eigen::Index k = 0; k < p.coeffs.rows(); ++k) {
    p.coeffs(k, 0) = sol(2 * k);
    p.coeffs(k, 1) = sol(2 * k + 1);
  }
  return p;
}

StationaryProfile solve_stationary_alpha0(const ModelConfig& config) {
  if (config.mode != Mode::decoupled)
    throw UnsupportedError("stationary profile is defined for the decoupled equation only");
  if (config.alpha != 0.0) throw UnsupportedError("solve_stationary_alpha0 requires alpha = 0");

  const EffectiveEquation eq = effective_equation(config);
  const double sum_c = std::accumulate(eq.jump_strengths.begin(), eq.jump_strengths.end(), 0.0);
  const double balance = sum_c / config.omega;
  const double scale = std::max(std::abs(eq.forcing_offset), std::abs(balance));
  if (std::abs(eq.forcing_offset - balance) > 1e-12 * scale)
    throw NoSolutionError("alpha = 0 requires A = sum(c_k)/omega");

  StationaryProfile p = profile_shape(config, eq);
  p.alpha_zero = true;
  const auto K = static_cast<Eigen::Index>(p.num_intervals());
  const double quad = eq.forcing_offset / (2.0 * eq.sigma);

  // Unknowns (beta_k, gamma_k); continuity, jumps and a zero-mean row. One of
  // the jump rows is redundant, so the stacked system is solved by QR.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * K + 1, 2 * K);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * K + 1);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::Index n = (k + 1) % K;
    const double L = p.lengths[static_cast<std::size_t>(k)];
    M(2 * k, 2 * k) += L;
    M(2 * k, 2 * k + 1) += 1.0;
    M(2 * k, 2 * n + 1) -= 1.0;
    rhs(2 * k) = -quad * L * L;
    M(2 * k + 1, 2 * n) += 1.0;
    M(2 * k + 1, 2 * k) -= 1.0;
    rhs(2 * k + 1) = 2.0 * quad * L - eq.jump_strengths[static_cast<std::size_t>(n)] / eq.sigma;
    M(2 * K, 2 * k) = L * L / 2.0;
    M(2 * K, 2 * k + 1) = L;
    rhs(2 * K) -= quad * L * L * L / 3.0;
  }
  const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
  const double residual = (M * sol - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>())))
    throw NoSolutionError("alpha = 0 stationary system is inconsistent");

  for (Eigen::Index k = 0; k < K; ++k) {
    p.coeffs(k, 0) = sol(2 * k);
    p.coeffs(k, 1) = sol(2 * k + 1);
  }
  return p;
}

StationaryProfile stationary_profile(const ModelConfig& config) {
  return config.alpha == 0.0 ? solve_stationary_alpha0(config) : solve_stationary(config);
}

Eigen::VectorXd sample(const StationaryProfile& profile, const Eigen::VectorXd& xs) {
  return xs.unaryExpr([&profile](double x) { return profile.value(x); });
}

SReport check_condition_S(const StationaryProfile& profile, const ModelConfig& config) {
  SReport report;
  if (profile.alpha_zero) {
    report.messages.emplace_back(
        "condition (S) is not checked for alpha = 0: the profile is only defined up to a "
        "constant");
    return report;
  }

  const std::size_t K = profile.num_intervals();
  double lowest = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> reaching;
  for (std::size_t k = 0; k < K; ++k) {
    IntervalExtrema ext{k, std::numeric_limits<double>::infinity(),
                        -std::numeric_limits<double>::infinity()};
    for (double u : critical_points(profile, k)) {
      const double v = profile.local_value(k, u);
      ext.min = std::min(ext.min, v);
      ext.max = std::max(ext.max, v);
    }
    if (ext.min < lowest) {
      lowest = ext.min;
      report.lowest_interval = k;
    }
    if (ext.min <= config.eta_c) reaching.push_back(k);
    report.per_interval.push_back(ext);
  }

  report.localized = reaching.size() == 1;
  const std::size_t i = report.localized ? reaching.front() : report.lowest_interval;
  if (report.localized) report.rupture_interval_index = i;

  report.eta_a_clearance = report.per_interval[i].max < config.eta_a;
  report.min_below_eta_c = report.per_interval[i].min < config.eta_c;
  report.condition_S_holds = report.localized && report.eta_a_clearance;

  std::ostringstream os;
  os.precision(6);
  if (reaching.empty()) {
    report.messages.emplace_back("s > eta_c everywhere: no interval reaches the threshold");
  } else if (reaching.size() > 1) {
    os << "s reaches eta_c on " << reaching.size() << " intervals";
    report.messages.push_back(os.str());
    os.str("");
  }
  if (!report.eta_a_clearance) {
    os << "max s on interval " << i << " is " << report.per_interval[i].max
       << " >= eta_a = " << config.eta_a;
    report.messages.push_back(os.str());
  }
  return report;
}

}  // namespace rupture
