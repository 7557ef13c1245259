#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rupture/config.hpp"
#include "rupture/solver.hpp"

namespace rupture::cli {

enum class ExitCode : int { ok = 0, model_violation = 1, config_error = 2, numerical_failure = 3 };

struct RunManifest {
  std::string command;        // simulate | bounds | stationary | find-periodic | verify
  std::string config_source;  // preset name or scenario file path
  bool from_preset = true;
  std::filesystem::path output_dir = "out";
  std::vector<std::pair<std::string, std::string>> overrides;

  std::optional<std::size_t> max_events;
  std::optional<double> t_end;
  std::optional<std::string> eta0;
  std::optional<double> fp_tol;
  std::optional<std::size_t> max_iter;
  /// Profile CSV checked by `verify`.
  std::optional<std::filesystem::path> profile;
};

/// Applies one `key=value` override to a scenario document. Keys are top
/// level names or `numerics.<name>`; bare numerics names are accepted too.
/// Values are JSON literals, comma-separated number lists, or bare words.
void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value);

/// Loads the preset or file, applies the overrides, then validates.
ModelConfig resolve_config(const RunManifest& manifest);

/// `const:<v>` or `const_plus_sine:<v>,<amp>,<freq>`; the sine is
/// v + amp * sin(2 pi freq x / omega).
Field parse_eta0(const std::string& spec, const Grid& grid);

/// Executes the command and writes its files. Errors are reported as one
/// line on `err` and mapped to exit codes.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Argument parsing front end.
int main(int argc, char** argv);

}  // namespace rupture::cli
