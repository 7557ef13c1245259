#pragma once

#include <string_view>
#include <vector>

#include "rupture/config.hpp"

namespace rupture {

/// Scenario presets for the three numerical experiments:
///   ex1 - decoupled, alpha = 1, eta_c = eta_a * 1e-12 (periodic orbit)
///   ex2 - decoupled, alpha = 60, eta_c = eta_a * 1e-1 (multi-interval rupture)
///   ex3 - coupled, sigma1/tau = 0.5, sigma2 = 1, alpha = 1 (no periodicity)
/// All share omega = 1, a = {0.1, 0.6, 0.9}, c_k = 1, A = 3, eta_a = 0.03, d = 0.1.
/// Throws SchemaError for an unknown name.
ModelConfig preset(std::string_view name);

std::vector<std::string_view> preset_names();

}  // namespace rupture
