#include "rupture/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rupture/errors.hpp"

namespace rupture::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_profile_csv(const std::filesystem::path& path, const Grid& grid,
                       const Eigen::VectorXd& values, std::string_view column) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << "x," << column << '\n';
  for (std::size_t j = 0; j < grid.n; ++j)
    out << format_double(grid.node(j)) << ',' << format_double(values(static_cast<Eigen::Index>(j)))
        << '\n';
}

Field read_profile_csv(const std::filesystem::path& path, double omega) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,", 0) != 0)
    throw ParseError(path.string() + ": missing x,<column> header");

  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(path.string() + ": malformed row");
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(line.substr(0, comma), &used));
      vs.push_back(std::stod(line.substr(comma + 1), &used));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": malformed number in row '" + line + "'");
    }
  }
  if (xs.size() < 4) throw SizeError(path.string() + ": need at least 4 rows");

  Grid grid{xs.size(), omega};
  for (std::size_t j = 0; j < xs.size(); ++j)
    if (std::abs(xs[j] - grid.node(j)) > 1e-12 * omega)
      throw DomainError(path.string() + ": x column is not the uniform periodic grid");
  return Field{grid, Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size())),
               0.0};
}

void write_stationary_csv(const std::filesystem::path& path, const StationaryProfile& profile,
                          const Grid& grid) {
  write_profile_csv(path, grid, sample(profile, grid.nodes()), "s");
}

json to_json(const BoundsReport& r) {
  return {{"t_lower", r.t_lower},
          {"t_upper", r.t_upper},
          {"lower_applicable", r.lower_applicable},
          {"upper_applicable", r.upper_applicable}};
}

json to_json(const SReport& r) {
  json per = json::array();
  for (const auto& e : r.per_interval) per.push_back({{"k", e.k}, {"min", e.min}, {"max", e.max}});
  return {{"condition_S_holds", r.condition_S_holds},
          {"rupture_interval_index",
           r.rupture_interval_index ? json(*r.rupture_interval_index) : json(nullptr)},
          {"lowest_interval", r.lowest_interval},
          {"localized", r.localized},
          {"eta_a_clearance", r.eta_a_clearance},
          {"min_below_eta_c", r.min_below_eta_c},
          {"per_interval", per},
          {"messages", r.messages}};
}

json to_json(const ValidationReport& r) {
  return {{"condition_C_holds", r.condition_C_holds},
          {"integral_f", r.integral_f},
          {"mass_conserving", r.mass_conserving},
          {"messages", r.messages}};
}

json to_json(const IterateRecord& r) {
  return {{"m", r.m},
          {"t_r", r.t_r},
          {"sup_diff", r.sup_diff},
          {"reset_intervals", r.reset_intervals},
          {"input_in_set", r.input_in_set},
          {"output_in_set", r.output_in_set}};
}

json to_json(const PeriodicityCheck& c) {
  return {{"periodic", c.periodic},
          {"first_period", c.first_gap},
          {"second_period", c.second_gap},
          {"first_diff", c.first_diff},
          {"second_diff", c.second_diff}};
}

json event_record(const RuptureEvent& event, std::string_view pre_csv, std::string_view post_csv) {
  return {{"j", event.index},
          {"t", event.time},
          {"reset_intervals", event.reset_intervals},
          {"min_eta", event.min_eta()},
          {"pre_csv", pre_csv},
          {"post_csv", post_csv}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace rupture::io
