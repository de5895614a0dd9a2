#pragma once

#include "mpefcs/generator.hpp"
#include "mpefcs/model.hpp"
#include "mpefcs/solution.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace mpefcs;

/// At most 5 requests, 2 vehicles and one physical charger; batteries low
/// enough that some routes must recharge.
inline ScenarioConfig tiny_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.n_requests = 5;
  cfg.fleet_size = 2;
  cfg.annulus_inner = 1.0;
  cfg.annulus_outer = 4.0;
  cfg.params.horizon = {420.0, 480.0};
  cfg.arrival_mean = 450.0;
  cfg.arrival_stddev = 15.0;
  cfg.charger_layout = {{Coord(1.0, 0.0), 1}};
  cfg.soc_low = 0.03;
  cfg.soc_high = 0.12;
  return cfg;
}

inline Instance tiny_instance(std::uint64_t seed) { return build_instance(generate_scenario(tiny_config(seed))); }

/// 100 requests over three hours around one station.
inline ScenarioConfig desk_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.n_requests = 100;
  cfg.fleet_size = 6;
  return cfg;
}

/// One station at the origin with a single departure; depot at the station.
inline Scenario one_station(double departure = 480.0) {
  Scenario s;
  s.params.horizon = {360.0, 540.0};
  s.stations = {{0, Coord(0.0, 0.0)}};
  s.timetable = {{0, departure}};
  s.vehicles = {VehicleSpec{}};
  return s;
}

inline RequestSpec request_at(int id, Coord origin, double departure = 480.0) {
  RequestSpec r;
  r.id = id;
  r.origin = origin;
  r.station = 0;
  r.desired_departure = departure;
  return r;
}

/// Node id of the meeting-point dummy built from physical point `physical`
/// in layer `layer`.
inline NodeId mp_dummy(const Instance& inst, int physical, int layer = 0) {
  for (NodeId m : inst.layer(layer).mps)
    if (inst.node(m).physical_id == physical) return m;
  return kNoNode;
}

}  // namespace fixtures
