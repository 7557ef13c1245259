#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rupture {

enum class Mode { decoupled, coupled };

/// Which reduction turns the (h, zeta) system into a single equation for eta.
///   case_i:  sigma2 == sigma1 / tau, forcing f / tau
///   case_ii: instantaneous relaxation of h, forcing (sigma2 / sigma1) f
enum class ReductionCase { case_i, case_ii };

struct Numerics {
  std::size_t grid_points = 1024;
  double dt = 1e-4;
  double event_tol = 1e-6;
  double fp_tol = 1e-6;
  std::size_t max_ruptures = 30;

  bool operator==(const Numerics&) const = default;
};

/// Physical parameters of the layer/bubble model. Dimensionless throughout.
struct ModelConfig {
  double omega = 1.0;
  std::vector<double> junctions;       // a_1 < ... < a_K in [0, omega)
  std::vector<double> jump_strengths;  // c_k, same index as junctions
  double forcing_offset = 0.0;         // A
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double tau = 1.0;
  double alpha = 0.0;
  double eta_c = 0.0;
  double eta_a = 0.0;
  double d = 0.0;
  Mode mode = Mode::decoupled;
  ReductionCase reduction_case = ReductionCase::case_i;
  Numerics numerics;

  std::size_t num_junctions() const { return junctions.size(); }
  double total_jump() const;
  /// Length of [a_k, a_{k+1}), wrapping the last interval around omega.
  double interval_length(std::size_t k) const;

  bool operator==(const ModelConfig&) const = default;
};

/// Coefficients of the single equation eta_t = sigma eta_xx - alpha eta + f
/// with f = sum c_k delta(x - a_k) - A, after the decoupling reduction.
struct EffectiveEquation {
  double sigma;
  double alpha;
  std::vector<double> jump_strengths;
  double forcing_offset;
  /// Factor applied to the raw forcing: 1/tau (case_i) or sigma2/sigma1 (case_ii).
  double forcing_scale;
};

EffectiveEquation effective_equation(const ModelConfig& config);

struct ValidationReport {
  bool condition_C_holds = false;
  double integral_f = 0.0;
  bool mass_conserving = false;
  std::vector<std::string> messages;

  bool operator==(const ValidationReport&) const = default;
};

/// Throws DomainError when a type invariant of ModelConfig is violated.
void check_invariants(const ModelConfig& config);

/// Reports condition (C), the integral of f, and whether A conserves mass.
/// Never throws.
ValidationReport validate(const ModelConfig& config);

ModelConfig parse_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const ModelConfig& config);

ModelConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ModelConfig& config, const std::filesystem::path& path);

std::string to_string(Mode mode);
std::string to_string(ReductionCase rc);

}  // namespace rupture
