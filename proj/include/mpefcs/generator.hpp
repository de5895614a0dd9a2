#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/scenario_io.hpp"

#include <cstdint>
#include <vector>

namespace mpefcs {

struct ChargerSite {
  Coord coord = Coord::Zero();
  int count = 1;
};

/// Case-study style scenario: grid meeting points around one station,
/// demand in an annulus, a regular timetable and a homogeneous fleet.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  int n_requests = 600;
  double annulus_inner = 1.5;  // km
  double annulus_outer = 6.0;  // km
  double mp_separation = 1.2;  // km
  double headway = 15.0;       // min between departures
  int fleet_size = 14;
  double soc_low = 0.5;   // fraction of battery
  double soc_high = 1.0;
  Coord station_coord = Coord::Zero();
  std::vector<ChargerSite> charger_layout{{Coord(0.0, 0.0), 2}, {Coord(1.0, 0.0), 1}};
  double charger_power_kw = 50.0;
  VehicleSpec vehicle;  // template; id and e_init are overwritten
  ServiceParams params;
  double arrival_mean = 450.0;  // min
  double arrival_stddev = 45.0; // min
};

/// Throws std::invalid_argument on violated config invariants.
void validate_config(const ScenarioConfig& cfg);

[[nodiscard]] json config_to_json(const ScenarioConfig& cfg);
/// Missing keys fall back to the case-study defaults.
[[nodiscard]] ScenarioConfig config_from_json(const json& j);

/// Square grid with spacing mp_separation anchored at the station; keeps the
/// points whose station distance lies in [inner - w_max, outer + w_max].
[[nodiscard]] std::vector<Coord> generate_mp_grid(const ScenarioConfig& cfg);

[[nodiscard]] std::vector<TimetableEntry> generate_timetable(const ScenarioConfig& cfg);

/// Throws std::invalid_argument on an empty timetable.
[[nodiscard]] std::vector<RequestSpec> generate_requests(const ScenarioConfig& cfg,
                                                         const std::vector<TimetableEntry>& timetable);

[[nodiscard]] std::vector<VehicleSpec> generate_fleet(const ScenarioConfig& cfg);

[[nodiscard]] Scenario generate_scenario(const ScenarioConfig& cfg);

}  // namespace mpefcs
