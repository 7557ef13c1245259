#include "rupture/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "rupture/errors.hpp"
#include "rupture/io.hpp"
#include "rupture/periodic.hpp"
#include "rupture/presets.hpp"
#include "rupture/rupture.hpp"
#include "rupture/stationary.hpp"

namespace rupture::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kNumericsKeys[] = {"grid_points", "dt", "event_tol", "fp_tol", "max_ruptures"};

const char* const kTopKeys[] = {"omega",  "junctions", "jump_strengths", "forcing_offset",
                                "sigma1", "sigma2",    "tau",            "alpha",
                                "eta_c",  "eta_a",     "d",              "mode",
                                "reduction_case"};

bool is_numerics_key(const std::string& key) {
  for (const char* k : kNumericsKeys)
    if (key == k) return true;
  return false;
}

bool is_top_key(const std::string& key) {
  for (const char* k : kTopKeys)
    if (key == k) return true;
  return false;
}

json parse_override_value(const std::string& value) {
  json parsed = json::parse(value, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  if (value.find(',') != std::string::npos) {
    json list = json::array();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      json v = json::parse(item, nullptr, false);
      if (v.is_discarded() || !v.is_number()) throw SchemaError("override list item '" + item + "' is not a number");
      list.push_back(v);
    }
    return list;
  }
  return value;
}

std::string tag(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

std::string one_line(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  return text;
}

json manifest_json(const RunManifest& m, const ModelConfig& config) {
  json overrides = json::array();
  for (const auto& [k, v] : m.overrides) overrides.push_back(k + "=" + v);
  json options = json::object();
  if (m.max_events) options["max_events"] = *m.max_events;
  if (m.t_end) options["t_end"] = *m.t_end;
  if (m.eta0) options["eta0"] = *m.eta0;
  if (m.fp_tol) options["fp_tol"] = *m.fp_tol;
  if (m.max_iter) options["max_iter"] = *m.max_iter;
  if (m.profile) options["profile"] = m.profile->filename().string();
  return {{"command", m.command},
          {"config_source", m.from_preset ? m.config_source : fs::path(m.config_source).filename().string()},
          {"source_kind", m.from_preset ? "preset" : "file"},
          {"overrides", overrides},
          {"options", options},
          {"config", to_json(config)}};
}

Field initial_profile(const RunManifest& m, const ModelConfig& config, const Grid& grid) {
  const std::string spec = m.eta0.value_or("const:" + io::format_double(config.eta_a));
  return parse_eta0(spec, grid);
}

State initial_state(const ModelConfig& config, const Field& eta0) {
  return config.mode == Mode::coupled ? State::coupled(eta0) : State::decoupled(eta0);
}

int cmd_simulate(const RunManifest& m, const ModelConfig& config, std::ostream& out) {
  const Grid grid = build_grid(config, config.numerics.grid_points);
  const Operators ops = assemble_operators(grid, config);
  StopCriterion stop{m.max_events, m.t_end};
  if (!stop.max_events && !stop.t_end) stop.max_events = config.numerics.max_ruptures;

  const RuptureRun run = run_with_rupture(config, ops, initial_state(config, initial_profile(m, config, grid)), stop);

  std::ofstream log(m.output_dir / "events.jsonl");
  if (!log) throw DomainError("cannot write events.jsonl");
  for (const RuptureEvent& e : run.events) {
    const std::string pre = "profile_pre_" + tag(e.index) + ".csv";
    const std::string post = "profile_post_" + tag(e.index) + ".csv";
    io::write_profile_csv(m.output_dir / pre, grid, e.pre.eta);
    io::write_profile_csv(m.output_dir / post, grid, e.post.eta);
    log << io::event_record(e, pre, post).dump() << '\n';
  }
  io::write_profile_csv(m.output_dir / "profile_final.csv", grid, run.final_state.eta);

  json report = {{"command", "simulate"},
                 {"events", run.events.size()},
                 {"final_time", run.final_state.time},
                 {"final_min_eta", run.final_state.eta.minCoeff()},
                 {"final_csv", "profile_final.csv"}};
  if (!run.events.empty()) {
    report["last_pre_csv"] = "profile_pre_" + tag(run.events.back().index) + ".csv";
    json diffs = json::array();
    for (std::size_t i = 1; i < run.events.size(); ++i)
      diffs.push_back((run.events[i].pre.eta - run.events[i - 1].pre.eta).lpNorm<Eigen::Infinity>());
    report["consecutive_pre_diffs"] = diffs;
  }
  io::write_json(m.output_dir / "report.json", report);
  out << run.events.size() << " rupture events, final time " << run.final_state.time << '\n';
  return 0;
}

int cmd_bounds(const RunManifest& m, const ModelConfig& config, std::ostream& out) {
  const Grid grid = build_grid(config, config.numerics.grid_points);
  const BoundsReport bounds = rupture_time_bounds(config, initial_profile(m, config, grid));
  json report = io::to_json(bounds);
  report["validation"] = io::to_json(validate(config));
  io::write_json(m.output_dir / "report.json", report);
  out << io::to_json(bounds).dump() << '\n';
  return 0;
}

int cmd_stationary(const RunManifest& m, const ModelConfig& config, std::ostream& out) {
  const Grid grid = build_grid(config, config.numerics.grid_points);
  const StationaryProfile profile = stationary_profile(config);
  io::write_stationary_csv(m.output_dir / "stationary.csv", profile, grid);
  const SReport s = check_condition_S(profile, config);
  json report = {{"command", "stationary"},
                 {"condition_S", io::to_json(s)},
                 {"validation", io::to_json(validate(config))},
                 {"stationary_csv", "stationary.csv"}};
  io::write_json(m.output_dir / "report.json", report);
  out << "condition (S) " << (s.condition_S_holds ? "holds" : "does not hold") << '\n';
  return 0;
}

int cmd_find_periodic(const RunManifest& m, const ModelConfig& config, std::ostream& out) {
  const Grid grid = build_grid(config, config.numerics.grid_points);
  const double fp_tol = m.fp_tol.value_or(config.numerics.fp_tol);
  const std::size_t max_iter = m.max_iter.value_or(config.numerics.max_ruptures);

  ConvergenceReport conv;
  try {
    conv = find_periodic(config, initial_profile(m, config, grid), fp_tol, max_iter);
  } catch (const ModelViolationError& e) {
    io::write_json(m.output_dir / "report.json",
                   {{"command", "find-periodic"}, {"status", "model_violation"}, {"message", e.what()}});
    throw;
  }

  json iterates = json::array();
  for (std::size_t i = 0; i < conv.iterates.size(); ++i) {
    const std::string pre = "profile_iter_" + tag(conv.iterates[i].m) + "_pre.csv";
    const std::string post = "profile_iter_" + tag(conv.iterates[i].m) + "_post.csv";
    io::write_profile_csv(m.output_dir / pre, conv.profiles[i].grid, conv.profiles[i].values);
    io::write_profile_csv(m.output_dir / post, conv.post_profiles[i].grid, conv.post_profiles[i].values);
    json row = io::to_json(conv.iterates[i]);
    row["pre_csv"] = pre;
    row["post_csv"] = post;
    iterates.push_back(row);
  }
  json report = {{"command", "find-periodic"},
                 {"status", conv.converged ? "converged" : "not_converged"},
                 {"converged", conv.converged},
                 {"period", conv.period},
                 {"fp_tol", fp_tol},
                 {"distinguished_interval",
                  conv.distinguished_interval ? json(*conv.distinguished_interval) : json(nullptr)},
                 {"iterates", iterates},
                 {"messages", conv.messages}};
  if (!conv.iterates.empty()) {
    io::write_profile_csv(m.output_dir / "profile_fixed.csv", conv.fixed_profile.grid,
                          conv.fixed_profile.values);
    report["fixed_csv"] = "profile_fixed.csv";
  }
  io::write_json(m.output_dir / "report.json", report);
  out << (conv.converged ? "converged" : "not converged") << " after " << conv.iterates.size()
      << " iterates, period " << conv.period << '\n';
  return 0;
}

int cmd_verify(const RunManifest& m, const ModelConfig& config, std::ostream& out) {
  if (!m.profile) throw SchemaError("verify needs --profile <csv>");
  const double tol = m.fp_tol.value_or(1e-5);
  const Field fixed = io::read_profile_csv(*m.profile, config.omega);
  PeriodicityCheck check;
  try {
    check = check_periodic(config, fixed, tol);
  } catch (const ModelViolationError& e) {
    io::write_json(m.output_dir / "report.json",
                   {{"command", "verify"}, {"status", "model_violation"}, {"message", e.what()}});
    throw;
  }
  json report = io::to_json(check);
  report["command"] = "verify";
  report["tol"] = tol;
  io::write_json(m.output_dir / "report.json", report);
  out << (check.periodic ? "periodic" : "not periodic") << '\n';
  return check.periodic ? 0 : static_cast<int>(ExitCode::model_violation);
}

}  // namespace

void apply_override(json& doc, const std::string& key, const std::string& value) {
  if (key.empty()) throw SchemaError("override with empty key");
  const json v = parse_override_value(value);
  if (key.rfind("numerics.", 0) == 0) {
    const std::string sub = key.substr(9);
    if (!is_numerics_key(sub)) throw SchemaError("unknown numerics key '" + sub + "'");
    doc["numerics"][sub] = v;
  } else if (is_numerics_key(key)) {
    doc["numerics"][key] = v;
  } else {
    if (!is_top_key(key)) throw SchemaError("unknown override key '" + key + "'");
    doc[key] = v;
  }
}

ModelConfig resolve_config(const RunManifest& m) {
  json doc;
  if (m.from_preset) {
    doc = to_json(preset(m.config_source));
  } else {
    std::ifstream in(m.config_source);
    if (!in) throw ParseError("cannot read scenario file " + m.config_source);
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed JSON in " + m.config_source);
    if (!doc.is_object()) throw SchemaError("scenario must be a JSON object");
  }
  for (const auto& [k, v] : m.overrides) apply_override(doc, k, v);
  return parse_scenario(doc);
}

Field parse_eta0(const std::string& spec, const Grid& grid) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw SchemaError("eta0 spec '" + spec + "' lacks a kind");
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SchemaError("eta0 spec '" + spec + "': bad number '" + item + "'");
    }
  }

  const Eigen::VectorXd x = grid.nodes();
  if (kind == "const") {
    if (args.size() != 1) throw SchemaError("const:<v> takes one value");
    return {grid, Eigen::VectorXd::Constant(x.size(), args[0]), 0.0};
  }
  if (kind == "const_plus_sine") {
    if (args.size() != 3) throw SchemaError("const_plus_sine:<v>,<amp>,<freq> takes three values");
    const double k = 2.0 * std::numbers::pi * args[2] / grid.omega;
    return {grid, (args[0] + args[1] * (k * x.array()).sin()).matrix(), 0.0};
  }
  throw SchemaError("unknown eta0 kind '" + kind + "'");
}

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    const ModelConfig config = resolve_config(m);
    fs::create_directories(m.output_dir);
    io::write_json(m.output_dir / "manifest.json", manifest_json(m, config));
    if (m.command == "simulate") return cmd_simulate(m, config, out);
    if (m.command == "bounds") return cmd_bounds(m, config, out);
    if (m.command == "stationary") return cmd_stationary(m, config, out);
    if (m.command == "find-periodic") return cmd_find_periodic(m, config, out);
    if (m.command == "verify") return cmd_verify(m, config, out);
    throw SchemaError("unknown command '" + m.command + "'");
  } catch (const ModelViolationError& e) {
    err << "model violation: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::model_violation);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  } catch (const Error& e) {
    err << "config error: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::config_error);
  } catch (const json::exception& e) {
    err << "config error: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::config_error);
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::exception& e) {
    err << "numerical failure: " << one_line(e.what()) << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Rupture-punctuated layer dynamics on a periodic bubble chain"};
  app.require_subcommand(1);

  RunManifest m;
  std::string preset_name;
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::size_t max_events = 0;
  double t_end = 0.0;
  std::string eta0;
  double fp_tol = 0.0;
  std::size_t max_iter = 0;
  std::string profile;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Run with ruptures and dump every event"},
      {"bounds", "Analytic bounds on the first rupture time"},
      {"stationary", "Stationary profile and condition (S)"},
      {"find-periodic", "Iterate the return map towards a periodic orbit"},
      {"verify", "Check that a profile is periodic over two further periods"}};

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* p = sub->add_option("--preset", preset_name, "ex1, ex2 or ex3");
    auto* c = sub->add_option("--config", config_path, "Scenario JSON file");
    p->excludes(c);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set", sets, "key=value override (repeatable)");
    sub->add_option("--max-events", max_events, "Stop after this many ruptures");
    sub->add_option("--t-end", t_end, "Stop at this time");
    sub->add_option("--eta0", eta0, "const:<v> or const_plus_sine:<v>,<amp>,<freq>");
    sub->add_option("--fp-tol", fp_tol, "Fixed-point / periodicity tolerance");
    sub->add_option("--max-iter", max_iter, "Maximum return-map iterates");
    if (name == "verify") sub->add_option("--profile", profile, "Profile CSV to check")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }

  CLI::App* sub = app.get_subcommands().front();
  m.command = sub->get_name();
  if (preset_name.empty() == config_path.empty()) {
    std::cerr << "config error: exactly one of --preset or --config is required\n";
    return static_cast<int>(ExitCode::config_error);
  }
  m.from_preset = !preset_name.empty();
  m.config_source = m.from_preset ? preset_name : config_path;
  m.output_dir = out_dir;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "config error: --set expects key=value, got '" << s << "'\n";
      return static_cast<int>(ExitCode::config_error);
    }
    m.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (sub->count("--max-events")) m.max_events = max_events;
  if (sub->count("--t-end")) m.t_end = t_end;
  if (sub->count("--eta0")) m.eta0 = eta0;
  if (sub->count("--fp-tol")) m.fp_tol = fp_tol;
  if (sub->count("--max-iter")) m.max_iter = max_iter;
  if (m.command == "verify") m.profile = profile;

  return run(m, std::cout, std::cerr);
}

}  // namespace rupture::cli
