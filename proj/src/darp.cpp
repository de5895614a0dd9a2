#include "mpefcs/darp.hpp"

#include <chrono>
#include <stdexcept>

namespace mpefcs {

Scenario darp_scenario(const Scenario& base, int fleet) {
  Scenario s = base;
  s.params.w_max = 0.0;
  s.params.enforce_energy = false;
  s.params.charge_to_full = false;
  s.chargers.clear();
  s.meeting_points.clear();
  for (std::size_t r = 0; r < base.requests.size(); ++r)
    s.meeting_points.push_back({static_cast<int>(r), base.requests[r].origin});
  s.vehicles.clear();
  if (!base.vehicles.empty()) {
    for (int k = 0; k < fleet; ++k) {
      VehicleSpec v = base.vehicles.front();
      v.id = k;
      v.e_init = v.e_max;
      s.vehicles.push_back(v);
    }
  }
  return s;
}

DarpResult solve_darp_baseline(const Instance& inst, const DarpConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Instance d = build_instance(darp_scenario(inst.scenario(), cfg.fleet_cap));
  SearchConfig sc = cfg.search;
  sc.rho = 0.0;
  Solution sol = lns_solve(d, sc);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  KpiReport k = compute_kpis(sol, d, sec);
  return {std::move(d), std::move(sol), k};
}

FleetSearchResult min_fleet_full_service(const Scenario& base, const SearchConfig& search, int lo, int hi) {
  if (base.vehicles.empty()) throw std::invalid_argument("fleet search needs a vehicle template");
  FleetSearchResult out;
  out.fleet = -1;
  for (int f = lo; f <= hi; ++f) {
    Scenario s = base;
    s.vehicles.clear();
    for (int k = 0; k < f; ++k) {
      VehicleSpec v = base.vehicles[static_cast<std::size_t>(k) % base.vehicles.size()];
      v.id = k;
      s.vehicles.push_back(v);
    }
    const Instance inst = build_instance(s);
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol = lns_solve(inst, search);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sol.rejected.empty()) {
      out.fleet = f;
      out.kpis = compute_kpis(sol, inst, sec);
      out.solution = std::move(sol);
      return out;
    }
  }
  return out;
}

}  // namespace mpefcs
