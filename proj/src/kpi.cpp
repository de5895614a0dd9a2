#include "mpefcs/kpi.hpp"

#include <set>

namespace mpefcs {

std::optional<double> cus_per_kmt(int served, double kmt) {
  if (kmt <= 0.0) return std::nullopt;
  return static_cast<double>(served) / kmt;
}

double co2_savings(double km_per_day, double days, double kg_per_km) { return km_per_day * days * kg_per_km / 1000.0; }

KpiReport compute_kpis(const Solution& sol, const Instance& inst, double wall_clock) {
  KpiReport k;
  k.requests = inst.request_count();
  k.cpu_seconds = wall_clock;
  k.objective = sol.objective;

  std::set<NodeId> activated;
  double walk = 0.0;
  for (std::size_t r = 0; r < sol.assignment.size(); ++r) {
    const NodeId m = sol.assignment[r];
    if (m == kNoNode) continue;
    ++k.served;
    activated.insert(m);
    for (const auto& c : inst.request(static_cast<int>(r)).candidates)
      if (c.mp == m) walk += c.walk_km;
  }
  k.service_rate = k.requests > 0 ? 100.0 * k.served / k.requests : 0.0;
  if (k.served > 0) k.avg_walk_km = walk / k.served;
  if (!activated.empty()) k.cus_per_mp = static_cast<double>(k.served) / static_cast<double>(activated.size());

  std::vector<int> riders_at(static_cast<std::size_t>(inst.node_count()), 0);
  for (NodeId m : sol.assignment)
    if (m != kNoNode) ++riders_at[static_cast<std::size_t>(m)];

  double ivt = 0.0;
  int ivt_n = 0;
  for (const auto& route : sol.routes) {
    bool pickup = false;
    for (std::size_t i = 0; i + 1 < route.stops.size(); ++i) k.kmt_km += inst.dist(route.stops[i], route.stops[i + 1]);
    for (std::size_t i = 0; i < route.stops.size(); ++i) {
      const NodeId n = route.stops[i];
      if (inst.is_station(n)) k.excess_wait_min += route.schedule[i].wait;
      if (!inst.is_mp(n) || riders_at[static_cast<std::size_t>(n)] == 0) continue;
      pickup = true;
      // Riders of this point leave at the block's station.
      for (std::size_t j = i + 1; j < route.stops.size(); ++j)
        if (inst.is_station(route.stops[j])) {
          const double ride = route.schedule[j].arrival - route.schedule[i].begin - inst.node(n).service_time;
          ivt += ride * riders_at[static_cast<std::size_t>(n)];
          ivt_n += riders_at[static_cast<std::size_t>(n)];
          break;
        }
    }
    if (pickup) ++k.used_vehicles;
  }
  if (ivt_n > 0) k.avg_ivt_min = ivt / ivt_n;
  for (const auto& ev : sol.charging) k.total_charging_min += ev.duration;
  k.cus_per_kmt = cus_per_kmt(k.served, k.kmt_km);
  return k;
}

json kpis_to_json(const KpiReport& k) {
  json j = {{"used_vehicles", k.used_vehicles},
            {"served", k.served},
            {"requests", k.requests},
            {"service_rate", k.service_rate},
            {"avg_walk_km", k.avg_walk_km},
            {"avg_ivt_min", k.avg_ivt_min},
            {"total_charging_min", k.total_charging_min},
            {"kmt_km", k.kmt_km},
            {"cus_per_kmt", nullptr},
            {"cus_per_mp", nullptr},
            {"excess_wait_min", k.excess_wait_min},
            {"cpu_seconds", k.cpu_seconds},
            {"objective", k.objective}};
  if (k.cus_per_kmt) j["cus_per_kmt"] = *k.cus_per_kmt;
  if (k.cus_per_mp) j["cus_per_mp"] = *k.cus_per_mp;
  return j;
}

}  // namespace mpefcs
