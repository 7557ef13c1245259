#include "rupture/presets.hpp"

#include <string>

#include "rupture/errors.hpp"

namespace rupture {

namespace {

ModelConfig common() {
  ModelConfig c;
  c.omega = 1.0;
  c.junctions = {0.1, 0.6, 0.9};
  c.jump_strengths = {1.0, 1.0, 1.0};
  c.forcing_offset = 3.0;
  c.sigma1 = 1.0;
  c.sigma2 = 1.0;
  c.tau = 1.0;
  c.eta_a = 0.03;
  c.d = 0.1;
  c.reduction_case = ReductionCase::case_i;
  return c;
}

}  // namespace

ModelConfig preset(std::string_view name) {
  ModelConfig c = common();
  if (name == "ex1") {
    c.mode = Mode::decoupled;
    c.alpha = 1.0;
    c.eta_c = c.eta_a * 1e-12;
  } else if (name == "ex2") {
    c.mode = Mode::decoupled;
    c.alpha = 60.0;
    c.eta_c = c.eta_a * 1e-1;
  } else if (name == "ex3") {
    c.mode = Mode::coupled;
    c.sigma1 = 0.5;
    c.sigma2 = 1.0;
    c.alpha = 1.0;
    c.eta_c = c.eta_a * 1e-12;
  } else {
    throw SchemaError("unknown preset '" + std::string(name) + "' (expected ex1, ex2 or ex3)");
  }
  return c;
}

std::vector<std::string_view> preset_names() { return {"ex1", "ex2", "ex3"}; }

}  // namespace rupture
