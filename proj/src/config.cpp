#include "rupture/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rupture/errors.hpp"

namespace rupture {

namespace {

const std::vector<std::string> kTopLevelKeys = {
    "omega", "junctions", "jump_strengths", "forcing_offset", "sigma1", "sigma2", "tau",
    "alpha", "eta_c",     "eta_a",          "d",              "mode",   "reduction_case",
    "numerics"};

const std::vector<std::string> kNumericsKeys = {"grid_points", "dt", "event_tol", "fp_tol",
                                                "max_ruptures"};

// Keys that may be omitted from a scenario file.
bool is_optional(const std::string& key) {
  return key == "numerics" || key == "reduction_case";
}

double get_number(const nlohmann::json& obj, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError("field '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const nlohmann::json& obj, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw SchemaError("field '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> get_number_list(const nlohmann::json& obj, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) throw SchemaError("field '" + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw SchemaError("field '" + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Mode parse_mode(const std::string& s) {
  if (s == "decoupled") return Mode::decoupled;
  if (s == "coupled") return Mode::coupled;
  throw SchemaError("mode must be 'decoupled' or 'coupled', got '" + s + "'");
}

ReductionCase parse_reduction(const std::string& s) {
  if (s == "case_i") return ReductionCase::case_i;
  if (s == "case_ii") return ReductionCase::case_ii;
  throw SchemaError("reduction_case must be 'case_i' or 'case_ii', got '" + s + "'");
}

std::string get_string(const nlohmann::json& obj, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw SchemaError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

double ModelConfig::total_jump() const {
  return std::accumulate(jump_strengths.begin(), jump_strengths.end(), 0.0);
}

double ModelConfig::interval_length(std::size_t k) const {
  const std::size_t K = junctions.size();
  if (k + 1 < K) return junctions[k + 1] - junctions[k];
  return junctions.front() + omega - junctions[k];
}

std::string to_string(Mode mode) { return mode == Mode::decoupled ? "decoupled" : "coupled"; }

std::string to_string(ReductionCase rc) {
  return rc == ReductionCase::case_i ? "case_i" : "case_ii";
}

EffectiveEquation effective_equation(const ModelConfig& config) {
  const double scale = config.reduction_case == ReductionCase::case_i
                           ? 1.0 / config.tau
                           : config.sigma2 / config.sigma1;
  EffectiveEquation eq{config.sigma2, config.alpha, config.jump_strengths,
                       scale * config.forcing_offset, scale};
  for (double& c : eq.jump_strengths) c *= scale;
  return eq;
}

void check_invariants(const ModelConfig& config) {
  auto fail = [](const std::string& msg) { throw DomainError(msg); };
  auto finite = [](double v) { return std::isfinite(v); };

  if (!(config.omega > 0.0) || !finite(config.omega)) fail("omega must be positive");
  const auto& a = config.junctions;
  if (a.empty()) fail("at least one junction is required");
  if (a.size() != config.jump_strengths.size())
    fail("junctions and jump_strengths must have the same length");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!finite(a[k]) || a[k] < 0.0 || a[k] >= config.omega)
      fail("junction positions must lie in [0, omega)");
    if (k > 0 && !(a[k] > a[k - 1])) fail("junction positions must be strictly increasing");
    if (!finite(config.jump_strengths[k])) fail("jump strengths must be finite");
  }
  if (!finite(config.forcing_offset)) fail("forcing_offset must be finite");
  if (!(config.sigma1 > 0.0) || !finite(config.sigma1)) fail("sigma1 must be positive");
  if (!(config.sigma2 > 0.0) || !finite(config.sigma2)) fail("sigma2 must be positive");
  if (!(config.tau > 0.0) || !finite(config.tau)) fail("tau must be positive");
  if (!(config.alpha >= 0.0) || !finite(config.alpha)) fail("alpha must be non-negative");
  if (!(config.eta_c > 0.0)) fail("eta_c must be positive");
  if (!(config.eta_a > config.eta_c) || !finite(config.eta_a)) fail("eta_a must exceed eta_c");
  if (!(config.d > 0.0) || !finite(config.d)) fail("d must be positive");

  const auto& n = config.numerics;
  if (n.grid_points < 4) fail("numerics.grid_points must be at least 4");
  if (!(n.dt > 0.0) || !finite(n.dt)) fail("numerics.dt must be positive");
  if (!(n.event_tol > 0.0)) fail("numerics.event_tol must be positive");
  if (!(n.fp_tol > 0.0)) fail("numerics.fp_tol must be positive");
}

ValidationReport validate(const ModelConfig& config) {
  ValidationReport report;
  const double sum_c = config.total_jump();
  report.integral_f = sum_c - config.forcing_offset * config.omega;

  const bool nonneg = std::all_of(config.jump_strengths.begin(), config.jump_strengths.end(),
                                  [](double c) { return c >= 0.0; });
  const double balance = sum_c / config.omega;
  report.condition_C_holds = nonneg && config.forcing_offset >= balance;

  const double scale = std::max(std::abs(config.forcing_offset), std::abs(balance));
  report.mass_conserving = std::abs(config.forcing_offset - balance) <= 1e-12 * scale;

  if (!nonneg) report.messages.emplace_back("condition (C) fails: some c_k is negative");
  if (config.forcing_offset < balance) {
    std::ostringstream os;
    os.precision(17);
    os << "condition (C) fails: A = " << config.forcing_offset << " < sum(c_k)/omega = "
       << balance;
    report.messages.push_back(os.str());
  }
  if (report.mass_conserving)
    report.messages.emplace_back("A = sum(c_k)/omega: integral of h is conserved");
  if (config.alpha == 0.0)
    report.messages.emplace_back("alpha = 0: ruptures need not recur");
  return report;
}

ModelConfig parse_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("scenario must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kTopLevelKeys.begin(), kTopLevelKeys.end(), key) == kTopLevelKeys.end())
      throw SchemaError("unknown field '" + key + "'");
  }
  for (const auto& key : kTopLevelKeys) {
    if (!is_optional(key) && !doc.contains(key))
      throw SchemaError("missing field '" + key + "'");
  }

  ModelConfig c;
  c.omega = get_number(doc, "omega");
  c.junctions = get_number_list(doc, "junctions");
  c.jump_strengths = get_number_list(doc, "jump_strengths");
  c.forcing_offset = get_number(doc, "forcing_offset");
  c.sigma1 = get_number(doc, "sigma1");
  c.sigma2 = get_number(doc, "sigma2");
  c.tau = get_number(doc, "tau");
  c.alpha = get_number(doc, "alpha");
  c.eta_c = get_number(doc, "eta_c");
  c.eta_a = get_number(doc, "eta_a");
  c.d = get_number(doc, "d");
  c.mode = parse_mode(get_string(doc, "mode"));
  if (doc.contains("reduction_case"))
    c.reduction_case = parse_reduction(get_string(doc, "reduction_case"));

  if (doc.contains("numerics")) {
    const auto& num = doc.at("numerics");
    if (!num.is_object()) throw SchemaError("field 'numerics' must be an object");
    for (const auto& [key, _] : num.items()) {
      if (std::find(kNumericsKeys.begin(), kNumericsKeys.end(), key) == kNumericsKeys.end())
        throw SchemaError("unknown field 'numerics." + key + "'");
    }
    if (num.contains("grid_points")) c.numerics.grid_points = get_count(num, "grid_points");
    if (num.contains("dt")) c.numerics.dt = get_number(num, "dt");
    if (num.contains("event_tol")) c.numerics.event_tol = get_number(num, "event_tol");
    if (num.contains("fp_tol")) c.numerics.fp_tol = get_number(num, "fp_tol");
    if (num.contains("max_ruptures")) c.numerics.max_ruptures = get_count(num, "max_ruptures");
  }

  check_invariants(c);
  return c;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"omega", c.omega},
      {"junctions", c.junctions},
      {"jump_strengths", c.jump_strengths},
      {"forcing_offset", c.forcing_offset},
      {"sigma1", c.sigma1},
      {"sigma2", c.sigma2},
      {"tau", c.tau},
      {"alpha", c.alpha},
      {"eta_c", c.eta_c},
      {"eta_a", c.eta_a},
      {"d", c.d},
      {"mode", to_string(c.mode)},
      {"reduction_case", to_string(c.reduction_case)},
      {"numerics",
       {{"grid_points", c.numerics.grid_points},
        {"dt", c.numerics.dt},
        {"event_tol", c.numerics.event_tol},
        {"fp_tol", c.numerics.fp_tol},
        {"max_ruptures", c.numerics.max_ruptures}}},
  };
}

ModelConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

void save_scenario(const ModelConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace rupture
