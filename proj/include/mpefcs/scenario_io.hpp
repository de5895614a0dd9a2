#pragma once

#include "mpefcs/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mpefcs {

using json = nlohmann::json;

/// Instance document: {params, timetable, stations, chargers, vehicles,
/// requests, meeting_points}. Matrices and dummy nodes are rebuilt on load.
[[nodiscard]] json scenario_to_json(const Scenario& s);
[[nodiscard]] Scenario scenario_from_json(const json& j);

[[nodiscard]] json params_to_json(const ServiceParams& p);
[[nodiscard]] ServiceParams params_from_json(const json& j, ServiceParams defaults = {});

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

[[nodiscard]] inline Instance load_instance(const std::filesystem::path& path) {
  return build_instance(scenario_from_json(read_json_file(path)));
}

[[nodiscard]] inline json coord_to_json(const Coord& c) { return json::array({c.x(), c.y()}); }
[[nodiscard]] inline Coord coord_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace mpefcs
