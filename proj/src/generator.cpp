#include "mpefcs/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mpefcs {

namespace {

// Independent streams so that e.g. changing the fleet size leaves the demand
// untouched for the same seed.
enum class Stream : std::uint64_t { Requests = 0x5245, Fleet = 0x464c };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void validate_config(const ScenarioConfig& cfg) {
  if (!(cfg.annulus_inner < cfg.annulus_outer)) throw std::invalid_argument("demand annulus needs inner < outer");
  if (cfg.annulus_inner < 0.0) throw std::invalid_argument("demand annulus inner radius is negative");
  if (!(cfg.mp_separation > 0.0)) throw std::invalid_argument("meeting point separation must be positive");
  if (!(0.0 <= cfg.soc_low && cfg.soc_low <= cfg.soc_high && cfg.soc_high <= 1.0))
    throw std::invalid_argument("soc range must satisfy 0 <= low <= high <= 1");
  if (cfg.n_requests < 0) throw std::invalid_argument("negative request count");
  if (cfg.fleet_size < 0) throw std::invalid_argument("negative fleet size");
  if (!(cfg.headway > 0.0)) throw std::invalid_argument("headway must be positive");
  if (cfg.arrival_stddev < 0.0) throw std::invalid_argument("arrival stddev must be nonnegative");
}

json config_to_json(const ScenarioConfig& cfg) {
  json layout = json::array();
  for (const auto& s : cfg.charger_layout) layout.push_back({{"x", s.coord.x()}, {"y", s.coord.y()}, {"count", s.count}});
  return json{{"seed", cfg.seed},
              {"n_requests", cfg.n_requests},
              {"demand_annulus", {cfg.annulus_inner, cfg.annulus_outer}},
              {"mp_separation", cfg.mp_separation},
              {"headway", cfg.headway},
              {"fleet_size", cfg.fleet_size},
              {"soc_range", {cfg.soc_low, cfg.soc_high}},
              {"station_coord", coord_to_json(cfg.station_coord)},
              {"charger_layout", layout},
              {"charger_power_kw", cfg.charger_power_kw},
              {"vehicle",
               {{"capacity", cfg.vehicle.capacity},
                {"battery_capacity", cfg.vehicle.battery_capacity},
                {"consumption", cfg.vehicle.consumption},
                {"e_min", cfg.vehicle.e_min},
                {"e_max", cfg.vehicle.e_max}}},
              {"params", params_to_json(cfg.params)},
              {"arrival_time_distribution", {{"mean", cfg.arrival_mean}, {"stddev", cfg.arrival_stddev}}}};
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.n_requests = j.value("n_requests", cfg.n_requests);
  if (j.contains("demand_annulus")) {
    cfg.annulus_inner = j.at("demand_annulus").at(0).get<double>();
    cfg.annulus_outer = j.at("demand_annulus").at(1).get<double>();
  }
  cfg.mp_separation = j.value("mp_separation", cfg.mp_separation);
  cfg.headway = j.value("headway", cfg.headway);
  cfg.fleet_size = j.value("fleet_size", cfg.fleet_size);
  if (j.contains("soc_range")) {
    cfg.soc_low = j.at("soc_range").at(0).get<double>();
    cfg.soc_high = j.at("soc_range").at(1).get<double>();
  }
  if (j.contains("station_coord")) cfg.station_coord = coord_from_json(j.at("station_coord"));
  if (j.contains("charger_layout")) {
    cfg.charger_layout.clear();
    for (const auto& s : j.at("charger_layout"))
      cfg.charger_layout.push_back({{s.at("x").get<double>(), s.at("y").get<double>()}, s.value("count", 1)});
  }
  cfg.charger_power_kw = j.value("charger_power_kw", cfg.charger_power_kw);
  if (j.contains("vehicle")) {
    const auto& v = j.at("vehicle");
    cfg.vehicle.capacity = v.value("capacity", cfg.vehicle.capacity);
    cfg.vehicle.battery_capacity = v.value("battery_capacity", cfg.vehicle.battery_capacity);
    cfg.vehicle.consumption = v.value("consumption", cfg.vehicle.consumption);
    cfg.vehicle.e_min = v.value("e_min", 0.0);
    cfg.vehicle.e_max = v.value("e_max", cfg.vehicle.battery_capacity);
  }
  if (j.contains("params")) cfg.params = params_from_json(j.at("params"));
  cfg.params.depot = j.contains("params") && j.at("params").contains("depot") ? cfg.params.depot : cfg.station_coord;
  if (j.contains("arrival_time_distribution")) {
    cfg.arrival_mean = j.at("arrival_time_distribution").value("mean", cfg.arrival_mean);
    cfg.arrival_stddev = j.at("arrival_time_distribution").value("stddev", cfg.arrival_stddev);
  }
  validate_config(cfg);
  return cfg;
}

std::vector<Coord> generate_mp_grid(const ScenarioConfig& cfg) {
  if (!(cfg.mp_separation > 0.0)) throw std::invalid_argument("meeting point separation must be positive");
  const double lo = std::max(0.0, cfg.annulus_inner - cfg.params.w_max);
  const double hi = cfg.annulus_outer + cfg.params.w_max;
  const int steps = static_cast<int>(std::floor(hi / cfg.mp_separation));
  std::vector<Coord> grid;
  for (int iy = -steps; iy <= steps; ++iy) {
    for (int ix = -steps; ix <= steps; ++ix) {
      const Coord offset(ix * cfg.mp_separation, iy * cfg.mp_separation);
      const double d = offset.norm();
      if (d >= lo - 1e-12 && d <= hi + 1e-12) grid.push_back(cfg.station_coord + offset);
    }
  }
  return grid;
}

std::vector<TimetableEntry> generate_timetable(const ScenarioConfig& cfg) {
  std::vector<TimetableEntry> out;
  const auto& h = cfg.params.horizon;
  for (int i = 0;; ++i) {
    const double t = h.start + i * cfg.headway;
    if (t > h.end + 1e-9) break;
    out.push_back({0, t});
  }
  return out;
}

std::vector<RequestSpec> generate_requests(const ScenarioConfig& cfg, const std::vector<TimetableEntry>& timetable) {
  if (timetable.empty()) throw std::invalid_argument("cannot generate requests for an empty timetable");
  auto rng = make_rng(cfg.seed, Stream::Requests);
  std::normal_distribution<double> arrival(cfg.arrival_mean, cfg.arrival_stddev);
  const auto& h = cfg.params.horizon;
  const double r2_lo = cfg.annulus_inner * cfg.annulus_inner;
  const double r2_hi = cfg.annulus_outer * cfg.annulus_outer;

  std::vector<RequestSpec> out;
  out.reserve(static_cast<std::size_t>(cfg.n_requests));
  for (int r = 0; r < cfg.n_requests; ++r) {
    const double radius = std::sqrt(uniform01(rng) * (r2_hi - r2_lo) + r2_lo);
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    double t = cfg.arrival_mean;
    if (cfg.arrival_stddev > 0.0) {
      do {
        t = arrival(rng);
      } while (t < h.start || t > h.end);
    }
    const TimetableEntry* best = &timetable.front();
    for (const auto& e : timetable)
      if (std::abs(e.departure - t) < std::abs(best->departure - t)) best = &e;
    RequestSpec spec;
    spec.id = r;
    spec.origin = cfg.station_coord + Coord(radius * std::cos(angle), radius * std::sin(angle));
    spec.station = best->station;
    spec.desired_departure = best->departure;
    out.push_back(spec);
  }
  return out;
}

std::vector<VehicleSpec> generate_fleet(const ScenarioConfig& cfg) {
  auto rng = make_rng(cfg.seed, Stream::Fleet);
  std::vector<VehicleSpec> fleet;
  for (int k = 0; k < cfg.fleet_size; ++k) {
    VehicleSpec v = cfg.vehicle;
    v.id = k;
    v.speed = cfg.params.bus_speed;
    const double frac = cfg.soc_low + (cfg.soc_high - cfg.soc_low) * uniform01(rng);
    v.e_init = std::clamp(frac * v.battery_capacity, v.e_min, v.e_max);
    fleet.push_back(v);
  }
  return fleet;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  Scenario s;
  s.params = cfg.params;
  s.stations.push_back({0, cfg.station_coord});
  s.timetable = generate_timetable(cfg);
  int charger_id = 0;
  for (const auto& site : cfg.charger_layout) {
    for (int c = 0; c < site.count; ++c) {
      ChargerSpec spec;
      spec.physical_id = charger_id++;
      spec.coord = site.coord;
      spec.rate = cfg.charger_power_kw / 60.0;
      s.chargers.push_back(spec);
    }
  }
  s.vehicles = generate_fleet(cfg);
  s.requests = generate_requests(cfg, s.timetable);
  const auto grid = generate_mp_grid(cfg);
  for (std::size_t m = 0; m < grid.size(); ++m) s.meeting_points.push_back({static_cast<int>(m), grid[m]});
  return s;
}

}  // namespace mpefcs
