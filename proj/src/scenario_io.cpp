#include "mpefcs/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace mpefcs {

json params_to_json(const ServiceParams& p) {
  return json{
      {"lambda", {p.lambda.travel, p.lambda.walk, p.lambda.wait, p.lambda.reject}},
      {"w_max", p.w_max},
      {"buffer", p.buffer},
      {"detour_factor", p.detour_factor},
      {"walk_speed", p.walk_speed},
      {"bus_speed", p.bus_speed},
      {"horizon", {p.horizon.start, p.horizon.end}},
      {"service_time_mp", p.service_time_mp},
      {"service_time_station", p.service_time_station},
      {"charger_dummy_count", p.charger_dummy_count},
      {"depot", coord_to_json(p.depot)},
      {"rho", p.rho},
      {"enforce_energy", p.enforce_energy},
      {"charge_to_full", p.charge_to_full},
  };
}

ServiceParams params_from_json(const json& j, ServiceParams p) {
  if (j.contains("lambda")) {
    const auto& l = j.at("lambda");
    p.lambda = {l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>(), l.at(3).get<double>()};
  }
  p.w_max = j.value("w_max", p.w_max);
  p.buffer = j.value("buffer", p.buffer);
  p.detour_factor = j.value("detour_factor", p.detour_factor);
  p.walk_speed = j.value("walk_speed", p.walk_speed);
  p.bus_speed = j.value("bus_speed", p.bus_speed);
  if (j.contains("horizon")) p.horizon = {j.at("horizon").at(0).get<double>(), j.at("horizon").at(1).get<double>()};
  p.service_time_mp = j.value("service_time_mp", p.service_time_mp);
  p.service_time_station = j.value("service_time_station", p.service_time_station);
  p.charger_dummy_count = j.value("charger_dummy_count", p.charger_dummy_count);
  if (j.contains("depot")) p.depot = coord_from_json(j.at("depot"));
  p.rho = j.value("rho", p.rho);
  p.enforce_energy = j.value("enforce_energy", p.enforce_energy);
  p.charge_to_full = j.value("charge_to_full", p.charge_to_full);
  return p;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["params"] = params_to_json(s.params);
  j["timetable"] = json::array();
  for (const auto& e : s.timetable) j["timetable"].push_back({{"station", e.station}, {"departure", e.departure}});
  j["stations"] = json::array();
  for (const auto& st : s.stations) j["stations"].push_back({{"id", st.id}, {"x", st.coord.x()}, {"y", st.coord.y()}});
  j["chargers"] = json::array();
  for (const auto& c : s.chargers)
    j["chargers"].push_back({{"id", c.physical_id},
                             {"x", c.coord.x()},
                             {"y", c.coord.y()},
                             {"rate_kwh_per_min", c.rate},
                             {"dummy_count", c.dummy_count}});
  j["vehicles"] = json::array();
  for (const auto& v : s.vehicles)
    j["vehicles"].push_back({{"id", v.id},
                             {"capacity", v.capacity},
                             {"battery_capacity", v.battery_capacity},
                             {"e_min", v.e_min},
                             {"e_max", v.e_max},
                             {"e_init", v.e_init},
                             {"consumption", v.consumption},
                             {"speed", v.speed}});
  j["requests"] = json::array();
  for (const auto& r : s.requests)
    j["requests"].push_back({{"id", r.id},
                             {"x", r.origin.x()},
                             {"y", r.origin.y()},
                             {"station", r.station},
                             {"departure", r.desired_departure}});
  j["meeting_points"] = json::array();
  for (const auto& m : s.meeting_points) j["meeting_points"].push_back({{"id", m.id}, {"x", m.coord.x()}, {"y", m.coord.y()}});
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    if (j.contains("params")) s.params = params_from_json(j.at("params"));
    for (const auto& e : j.value("timetable", json::array()))
      s.timetable.push_back({e.at("station").get<int>(), e.at("departure").get<double>()});
    for (const auto& st : j.value("stations", json::array()))
      s.stations.push_back({st.at("id").get<int>(), {st.at("x").get<double>(), st.at("y").get<double>()}});
    for (const auto& c : j.value("chargers", json::array())) {
      ChargerSpec spec;
      spec.physical_id = c.at("id").get<int>();
      spec.coord = {c.at("x").get<double>(), c.at("y").get<double>()};
      spec.rate = c.value("rate_kwh_per_min", spec.rate);
      spec.dummy_count = c.value("dummy_count", 0);
      s.chargers.push_back(spec);
    }
    for (const auto& v : j.value("vehicles", json::array())) {
      VehicleSpec spec;
      spec.id = v.at("id").get<int>();
      spec.capacity = v.value("capacity", spec.capacity);
      spec.battery_capacity = v.value("battery_capacity", spec.battery_capacity);
      spec.e_min = v.value("e_min", spec.e_min);
      spec.e_max = v.value("e_max", spec.battery_capacity);
      spec.e_init = v.value("e_init", spec.e_max);
      spec.consumption = v.value("consumption", spec.consumption);
      spec.speed = v.value("speed", s.params.bus_speed);
      s.vehicles.push_back(spec);
    }
    for (const auto& r : j.value("requests", json::array()))
      s.requests.push_back({r.at("id").get<int>(),
                            {r.at("x").get<double>(), r.at("y").get<double>()},
                            r.at("station").get<int>(),
                            r.at("departure").get<double>()});
    for (const auto& m : j.value("meeting_points", json::array()))
      s.meeting_points.push_back({m.at("id").get<int>(), {m.at("x").get<double>(), m.at("y").get<double>()}});
  } catch (const json::exception& e) {
    throw InstanceError(std::string("malformed instance document: ") + e.what());
  }
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace mpefcs
