#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rupture/periodic.hpp"
#include "rupture/rupture.hpp"
#include "rupture/solver.hpp"
#include "rupture/stationary.hpp"

namespace rupture::io {

/// 17 significant digits, round-trips every double.
std::string format_double(double v);

/// Two-column CSV `x,<column>` over the grid nodes.
void write_profile_csv(const std::filesystem::path& path, const Grid& grid,
                       const Eigen::VectorXd& values, std::string_view column = "value");

/// Reads a two-column CSV written by write_profile_csv. The x column must be
/// the uniform grid j * omega / n. Throws ParseError or DomainError.
Field read_profile_csv(const std::filesystem::path& path, double omega);

void write_stationary_csv(const std::filesystem::path& path, const StationaryProfile& profile,
                          const Grid& grid);

nlohmann::json to_json(const BoundsReport& report);
nlohmann::json to_json(const SReport& report);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const IterateRecord& record);
nlohmann::json to_json(const PeriodicityCheck& check);

/// One line of the event log.
nlohmann::json event_record(const RuptureEvent& event, std::string_view pre_csv,
                            std::string_view post_csv);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace rupture::io
